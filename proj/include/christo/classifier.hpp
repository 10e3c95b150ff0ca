#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "christo/christoffel.hpp"
#include "christo/datasets.hpp"
#include "christo/moments.hpp"

namespace christo {

/// Lagrange polynomials theta_1..theta_m on the nodes {1..m}: theta_j(i) = delta_ij.
struct InterpolationBasis {
  int classes = 0;
  /// Row j-1 holds the coefficients of theta_j in 1, y, ..., y^{m-1}.
  Eigen::MatrixXd coefficients;

  /// theta_j(y) from the product formula; exactly 1 or 0 at integer nodes.
  double operator()(int j, double y) const;
  /// theta_j(y) from the coefficient table (Horner).
  double power_form(int j, double y) const;
};

/// Supports 2 <= m <= 12; throws UsageError otherwise.
InterpolationBasis make_theta(int m);

/// Returned by classify when the reject threshold is set and every score falls below it.
inline constexpr int kRejectLabel = 0;

struct ModelMetadata {
  std::uint64_t seed = 0;
  std::uint64_t dataset_hash = 0;
  std::string rng = Rng::kName;

  bool operator==(const ModelMetadata&) const = default;
};

struct FitOptions {
  /// Unset selects default_degree().
  std::optional<int> degree;
  ThresholdPolicy policy = ThresholdPolicy::relative();
  ClassWeighting weighting = ClassWeighting::uniform;
  /// Quantile of each class's own training scores stored as its default superlevel gamma.
  double gamma_quantile = 0.05;
  ModelMetadata metadata;
};

/// Per-class empirical Christoffel functions sharing one degree and one input scaling.
/// Immutable once built; all queries are const and thread-safe.
class ClassifierModel {
public:
  ClassifierModel() = default;
  ClassifierModel(int degree, std::vector<ChristoffelEvaluator> evaluators,
                  AffineTransform transform, ClassWeighting weighting,
                  std::vector<double> class_gamma, ModelMetadata metadata);

  int dimension() const { return transform_.dimension(); }
  int classes() const { return static_cast<int>(evaluators_.size()); }
  int degree() const { return degree_; }
  const std::vector<ChristoffelEvaluator>& evaluators() const { return evaluators_; }
  const AffineTransform& transform() const { return transform_; }
  ClassWeighting weighting() const { return weighting_; }
  const ThresholdPolicy& policy() const { return evaluators_.front().policy(); }
  /// Default gamma_j for superlevel sets, one per class.
  const std::vector<double>& class_gamma() const { return class_gamma_; }
  const ModelMetadata& metadata() const { return metadata_; }

  std::optional<double> reject_threshold() const { return reject_threshold_; }
  void set_reject_threshold(std::optional<double> gamma_min) { reject_threshold_ = gamma_min; }

  /// (q_1(x), ..., q_m(x)) with q_j = Lambda_j^{-1}; +infinity off-range.
  Eigen::VectorXd inverse_scores(std::span<const double> x) const;
  /// (Lambda_1(x), ..., Lambda_m(x)), raw and unnormalized.
  Eigen::VectorXd scores(std::span<const double> x) const;
  /// Argmax of scores(x) over {1..m}, smallest index on ties; kRejectLabel when a reject
  /// threshold is set and max_j Lambda_j(x) falls below it.
  int classify(std::span<const double> x) const;
  /// Variant joint CF: [sum_j theta_j(y)^2 Lambda_j(x)^{-1}]^{-1}. For y = j in {1..m} this
  /// is bit-identical to scores(x)[j-1].
  double joint_cf(std::span<const double> x, double y) const;

  bool operator==(const ClassifierModel& other) const;

private:
  int degree_ = 0;
  std::vector<ChristoffelEvaluator> evaluators_;
  AffineTransform transform_;
  ClassWeighting weighting_ = ClassWeighting::uniform;
  std::vector<double> class_gamma_;
  ModelMetadata metadata_;
  std::optional<double> reject_threshold_;
  InterpolationBasis theta_;
};

/// Largest t >= 1 with s(t) <= ceil(N_min / 2).
int default_degree(int n, std::size_t min_class_size);

/// Fits the scaling on the whole dataset, splits by class and builds one evaluator per class.
ClassifierModel fit(const LabeledDataset& dataset, const FitOptions& options = {});

/// Linear-interpolation quantile of `values` (modified in place), q in [0, 1].
double quantile(std::vector<double> values, double q);

/// CF of the joint empirical measure on the variety basis Gamma_t (no input scaling).
ChristoffelEvaluator variety_cf(const LabeledDataset& dataset, int t,
                                ThresholdPolicy policy = ThresholdPolicy::relative());
/// CF of the joint empirical measure on the tensor basis (degree t in x, m-1 in y).
ChristoffelEvaluator tensor_cf(const LabeledDataset& dataset, int t,
                               ThresholdPolicy policy = ThresholdPolicy::relative());

struct JointQuery {
  std::vector<double> x;
  int y = 1;
};

struct SandwichViolation {
  JointQuery query;
  double variety_t = 0.0;     // q_t
  double tensor_t = 0.0;      // variant q^_t
  double variety_next = 0.0;  // q_{t+m-1}
};

struct SandwichReport {
  std::size_t checked = 0;
  std::vector<SandwichViolation> violations;
};

/// Checks q_t <= q^_t <= q_{t+m-1} (inverse CFs, +infinity off-range) at each query with
/// slack 1e-9 (1 + |q|).
SandwichReport sandwich_check(const LabeledDataset& dataset, int t,
                              const std::vector<JointQuery>& grid);

}  // namespace christo
