#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "christo/multiindex.hpp"

namespace christo {

/// Row-major so each point is a contiguous span.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Point cloud in R^n with 1-based class labels in {1..m}.
struct LabeledDataset {
  PointMatrix points;
  std::vector<int> labels;
  int classes = 0;

  std::size_t size() const { return labels.size(); }
  int dimension() const { return static_cast<int>(points.cols()); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(points.cols()),
            static_cast<std::size_t>(points.cols())};
  }

  /// Points per class, index 0 holding class 1.
  std::vector<std::size_t> class_counts() const;

  /// Throws DataError unless labels lie in {1..m}, coordinates are finite and N >= 1.
  void validate() const;

  bool operator==(const LabeledDataset& other) const;
};

/// How per-class measures are normalized.
enum class ClassWeighting {
  uniform,  // every class has mass 1
  prior,    // class j has mass N_j / N
};

/// Weighted atomic measure sum_i w_i delta_{x_i}.
struct EmpiricalMeasure {
  PointMatrix points;
  Eigen::VectorXd weights;
  double mass = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(points.cols()),
            static_cast<std::size_t>(points.cols())};
  }
};

/// Uniform weights mass / N on every row of `points`.
EmpiricalMeasure uniform_measure(PointMatrix points, double mass = 1.0);

/// One measure per class, in label order. Throws DataError naming the first empty class.
std::vector<EmpiricalMeasure> class_split(const LabeledDataset& dataset,
                                          ClassWeighting weighting = ClassWeighting::uniform);

/// Gram matrix of a monomial basis under an empirical measure.
struct MomentMatrix {
  MonomialBasis basis;
  Eigen::MatrixXd entries;
  double mass = 1.0;
  /// Number of atoms of the measure; bounds the rank.
  std::size_t support_size = 0;
};

/// M = sum_i w_i v_t(x_i) v_t(x_i)^T, accumulated in point order with Neumaier summation.
MomentMatrix empirical_moment_matrix(const EmpiricalMeasure& measure, const MonomialBasis& basis);

/// Gram matrix of the joint monomials x^alpha y^k under mu_N = (1/N) sum_i delta_{(x_i, y_i)}.
MomentMatrix joint_moment_matrix(const LabeledDataset& dataset, const MonomialBasis& basis);

}  // namespace christo
