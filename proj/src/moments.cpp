#include "christo/moments.hpp"

#include <cmath>
#include <string>

#include "christo/errors.hpp"

namespace christo {

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(classes, 0)), 0);
  for (int label : labels) {
    if (label >= 1 && label <= classes) ++counts[static_cast<std::size_t>(label - 1)];
  }
  return counts;
}

void LabeledDataset::validate() const {
  if (labels.empty()) throw DataError("dataset is empty");
  if (static_cast<std::size_t>(points.rows()) != labels.size()) {
    throw DataError("dataset has " + std::to_string(points.rows()) + " points but " +
                    std::to_string(labels.size()) + " labels");
  }
  if (points.cols() < 1) throw DataError("dataset points have no coordinates");
  if (classes < 1) throw DataError("dataset declares no classes");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > classes) {
      throw DataError("label " + std::to_string(labels[i]) + " of point " + std::to_string(i) +
                      " outside 1.." + std::to_string(classes));
    }
  }
  if (!points.allFinite()) throw DataError("dataset contains non-finite coordinates");
}

bool LabeledDataset::operator==(const LabeledDataset& other) const {
  return classes == other.classes && labels == other.labels &&
         points.rows() == other.points.rows() && points.cols() == other.points.cols() &&
         points == other.points;
}

EmpiricalMeasure uniform_measure(PointMatrix points, double mass) {
  if (points.rows() == 0) throw DataError("empirical measure needs at least one point");
  EmpiricalMeasure measure;
  const auto count = points.rows();
  measure.points = std::move(points);
  measure.weights = Eigen::VectorXd::Constant(count, mass / static_cast<double>(count));
  measure.mass = mass;
  return measure;
}

std::vector<EmpiricalMeasure> class_split(const LabeledDataset& dataset, ClassWeighting weighting) {
  dataset.validate();
  const auto counts = dataset.class_counts();
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) throw DataError("class " + std::to_string(j + 1) + " has no points");
  }

  std::vector<EmpiricalMeasure> measures;
  measures.reserve(counts.size());
  const double total = static_cast<double>(dataset.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    PointMatrix rows(static_cast<Eigen::Index>(counts[j]), dataset.points.cols());
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.labels[i] == static_cast<int>(j + 1)) rows.row(r++) = dataset.points.row(static_cast<Eigen::Index>(i));
    }
    const double mass =
        weighting == ClassWeighting::prior ? static_cast<double>(counts[j]) / total : 1.0;
    measures.push_back(uniform_measure(std::move(rows), mass));
  }
  return measures;
}

namespace {

// Upper-triangular Neumaier accumulation of sum_i w_i v_i v_i^T.
class GramAccumulator {
public:
  explicit GramAccumulator(Eigen::Index size)
      : sum_(Eigen::MatrixXd::Zero(size, size)), comp_(Eigen::MatrixXd::Zero(size, size)) {}

  void add(const Eigen::VectorXd& v, double w) {
    const Eigen::Index s = v.size();
    for (Eigen::Index b = 0; b < s; ++b) {
      const double wb = w * v[b];
      for (Eigen::Index a = 0; a <= b; ++a) {
        const double term = wb * v[a];
        const double acc = sum_(a, b);
        const double next = acc + term;
        if (std::abs(acc) >= std::abs(term)) {
          comp_(a, b) += (acc - next) + term;
        } else {
          comp_(a, b) += (term - next) + acc;
        }
        sum_(a, b) = next;
      }
    }
  }

  Eigen::MatrixXd result() const {
    Eigen::MatrixXd m = sum_ + comp_;
    m.triangularView<Eigen::StrictlyLower>() = m.transpose().triangularView<Eigen::StrictlyLower>();
    return m;
  }

private:
  Eigen::MatrixXd sum_;
  Eigen::MatrixXd comp_;
};

}  // namespace

MomentMatrix empirical_moment_matrix(const EmpiricalMeasure& measure, const MonomialBasis& basis) {
  if (basis.is_joint()) throw DataError("empirical_moment_matrix needs a plain basis");
  if (measure.points.cols() != basis.dimension()) {
    throw DataError("measure points have dimension " + std::to_string(measure.points.cols()) +
                    ", basis expects " + std::to_string(basis.dimension()));
  }
  if (static_cast<std::size_t>(measure.weights.size()) != measure.size()) {
    throw DataError("measure weight count does not match its point count");
  }
  if (!measure.points.allFinite()) throw DataError("measure contains non-finite coordinates");

  GramAccumulator acc(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < measure.size(); ++i) {
    acc.add(eval_monomials(basis, measure.point(i)), measure.weights[static_cast<Eigen::Index>(i)]);
  }
  return MomentMatrix{basis, acc.result(), measure.mass, measure.size()};
}

MomentMatrix joint_moment_matrix(const LabeledDataset& dataset, const MonomialBasis& basis) {
  if (!basis.is_joint()) throw DataError("joint_moment_matrix needs a variety or tensor basis");
  dataset.validate();
  if (dataset.dimension() != basis.dimension()) {
    throw DataError("dataset has dimension " + std::to_string(dataset.dimension()) +
                    ", basis expects " + std::to_string(basis.dimension()));
  }
  if (dataset.classes > basis.classes()) {
    throw DataError("dataset has " + std::to_string(dataset.classes) +
                    " classes, basis supports " + std::to_string(basis.classes()));
  }

  GramAccumulator acc(static_cast<Eigen::Index>(basis.size()));
  const double w = 1.0 / static_cast<double>(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    acc.add(eval_joint_monomials(basis, dataset.point(i), dataset.labels[i]), w);
  }
  return MomentMatrix{basis, acc.result(), 1.0, dataset.size()};
}

}  // namespace christo
