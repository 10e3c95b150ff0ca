#include "christo/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "christo/errors.hpp"
#include "christo/log.hpp"

namespace christo {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Coefficients (ascending powers) of prod_{i != j} (y - i) / prod_{i != j} (j - i).
Eigen::VectorXd lagrange_coefficients(int j, int m) {
  Eigen::VectorXd poly = Eigen::VectorXd::Zero(m);
  poly[0] = 1.0;
  int degree = 0;
  double denominator = 1.0;
  for (int i = 1; i <= m; ++i) {
    if (i == j) continue;
    // poly *= (y - i)
    for (int k = degree + 1; k >= 1; --k) poly[k] = poly[k - 1] - i * poly[k];
    poly[0] = -i * poly[0];
    ++degree;
    denominator *= static_cast<double>(j - i);
  }
  return poly / denominator;
}

bool same_evaluator(const ChristoffelEvaluator& a, const ChristoffelEvaluator& b) {
  return a.basis() == b.basis() && a.eigenvalues().size() == b.eigenvalues().size() &&
         a.eigenvalues() == b.eigenvalues() && a.eigenvectors() == b.eigenvectors() &&
         a.threshold() == b.threshold() && a.mass() == b.mass() && a.policy() == b.policy() &&
         a.support_size() == b.support_size();
}

}  // namespace

double InterpolationBasis::operator()(int j, double y) const {
  double numerator = 1.0;
  double denominator = 1.0;
  for (int i = 1; i <= classes; ++i) {
    if (i == j) continue;
    numerator *= y - i;
    denominator *= static_cast<double>(j - i);
  }
  return numerator / denominator;
}

double InterpolationBasis::power_form(int j, double y) const {
  const auto row = coefficients.row(j - 1);
  double acc = 0.0;
  for (Eigen::Index k = row.size() - 1; k >= 0; --k) acc = acc * y + row[k];
  return acc;
}

InterpolationBasis make_theta(int m) {
  if (m < 2 || m > 12) throw UsageError("interpolation basis needs 2 <= m <= 12, got " + std::to_string(m));
  InterpolationBasis basis;
  basis.classes = m;
  basis.coefficients.resize(m, m);
  for (int j = 1; j <= m; ++j) basis.coefficients.row(j - 1) = lagrange_coefficients(j, m).transpose();
  return basis;
}

// ---------------------------------------------------------------------------

ClassifierModel::ClassifierModel(int degree, std::vector<ChristoffelEvaluator> evaluators,
                                 AffineTransform transform, ClassWeighting weighting,
                                 std::vector<double> class_gamma, ModelMetadata metadata)
    : degree_(degree),
      evaluators_(std::move(evaluators)),
      transform_(std::move(transform)),
      weighting_(weighting),
      class_gamma_(std::move(class_gamma)),
      metadata_(std::move(metadata)) {
  if (evaluators_.empty()) throw DataError("model needs at least one class");
  transform_.validate();
  for (const auto& ev : evaluators_) {
    const auto& b = ev.basis();
    if (b.kind() != BasisKind::plain || b.dimension() != transform_.dimension() ||
        b.degree() != degree_) {
      throw DataError("class evaluators must share one plain basis of the model's n and t");
    }
  }
  if (class_gamma_.size() != evaluators_.size()) {
    throw DataError("model needs one default gamma per class");
  }
  if (evaluators_.size() >= 2 && evaluators_.size() <= 12) {
    theta_ = make_theta(static_cast<int>(evaluators_.size()));
  }
}

Eigen::VectorXd ClassifierModel::inverse_scores(std::span<const double> x) const {
  const auto scaled = transform_.apply(x);
  // All classes share the basis, so v_t(x) is computed once.
  const Eigen::VectorXd v = evaluators_.front().monomials(scaled);
  Eigen::VectorXd q(classes());
  for (int j = 0; j < classes(); ++j) q[j] = evaluators_[static_cast<std::size_t>(j)].inverse_score(v);
  return q;
}

Eigen::VectorXd ClassifierModel::scores(std::span<const double> x) const {
  const Eigen::VectorXd q = inverse_scores(x);
  Eigen::VectorXd s(q.size());
  for (Eigen::Index j = 0; j < q.size(); ++j) s[j] = std::isinf(q[j]) ? 0.0 : 1.0 / q[j];
  return s;
}

int ClassifierModel::classify(std::span<const double> x) const {
  const Eigen::VectorXd s = scores(x);
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < s.size(); ++j) {
    if (s[j] > s[best]) best = j;
  }
  if (reject_threshold_ && s[best] < *reject_threshold_) return kRejectLabel;
  return static_cast<int>(best) + 1;
}

double ClassifierModel::joint_cf(std::span<const double> x, double y) const {
  if (!std::isfinite(y)) throw DataError("joint_cf needs a finite y");
  const Eigen::VectorXd q = inverse_scores(x);
  if (classes() == 1) return std::isinf(q[0]) ? 0.0 : 1.0 / q[0];
  if (theta_.classes == 0) throw UsageError("joint_cf supports at most 12 classes");
  double total = 0.0;
  for (int j = 1; j <= classes(); ++j) {
    const double theta = theta_(j, y);
    // Skipped terms keep 0 * inf from turning into NaN.
    if (theta == 0.0) continue;
    total += theta * theta * q[j - 1];
  }
  return std::isinf(total) ? 0.0 : 1.0 / total;
}

bool ClassifierModel::operator==(const ClassifierModel& other) const {
  if (degree_ != other.degree_ || evaluators_.size() != other.evaluators_.size() ||
      !(transform_ == other.transform_) || weighting_ != other.weighting_ ||
      class_gamma_ != other.class_gamma_ || !(metadata_ == other.metadata_) ||
      reject_threshold_ != other.reject_threshold_) {
    return false;
  }
  for (std::size_t j = 0; j < evaluators_.size(); ++j) {
    if (!same_evaluator(evaluators_[j], other.evaluators_[j])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

int default_degree(int n, std::size_t min_class_size) {
  const std::size_t budget = (min_class_size + 1) / 2;
  int t = 1;
  while (polynomial_space_dim(n, t + 1) <= budget) ++t;
  return t;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ClassifierModel fit(const LabeledDataset& dataset, const FitOptions& options) {
  dataset.validate();
  const int n = dataset.dimension();
  const auto counts = dataset.class_counts();
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) throw DataError("class " + std::to_string(j + 1) + " has no points");
  }
  const int t = options.degree ? *options.degree
                               : default_degree(n, *std::min_element(counts.begin(), counts.end()));
  if (t < 1) throw UsageError("degree must be >= 1, got " + std::to_string(t));

  AffineTransform transform = fit_unit_box(dataset.points);
  const LabeledDataset scaled{transform.apply(dataset.points), dataset.labels, dataset.classes};
  const auto measures = class_split(scaled, options.weighting);
  const MonomialBasis basis = enumerate_basis(n, t);
  const std::size_t full = basis.size();

  std::vector<ChristoffelEvaluator> evaluators;
  std::vector<double> gamma;
  evaluators.reserve(measures.size());
  for (std::size_t j = 0; j < measures.size(); ++j) {
    const auto& measure = measures[j];
    auto ev = build_evaluator(empirical_moment_matrix(measure, basis), options.policy);
    if (ev.rank() < full) {
      warn("class " + std::to_string(j + 1) + ": moment matrix rank " + std::to_string(ev.rank()) +
           " < s(t) = " + std::to_string(full) + " (" + std::to_string(measure.size()) +
           " points); scores vanish off the sample's polynomial hull");
    }
    std::vector<double> own;
    own.reserve(measure.size());
    for (std::size_t i = 0; i < measure.size(); ++i) own.push_back(eval_cf(ev, measure.point(i)));
    gamma.push_back(quantile(std::move(own), options.gamma_quantile));
    evaluators.push_back(std::move(ev));
  }

  ModelMetadata metadata = options.metadata;
  metadata.dataset_hash = dataset_hash(dataset);
  return ClassifierModel(t, std::move(evaluators), std::move(transform), options.weighting,
                         std::move(gamma), std::move(metadata));
}

// ---------------------------------------------------------------------------

ChristoffelEvaluator variety_cf(const LabeledDataset& dataset, int t, ThresholdPolicy policy) {
  const auto basis = enumerate_variety_basis(dataset.dimension(), t, dataset.classes);
  return build_evaluator(joint_moment_matrix(dataset, basis), policy);
}

ChristoffelEvaluator tensor_cf(const LabeledDataset& dataset, int t, ThresholdPolicy policy) {
  const auto basis = enumerate_tensor_basis(dataset.dimension(), t, dataset.classes);
  return build_evaluator(joint_moment_matrix(dataset, basis), policy);
}

namespace {

bool ordered(double a, double b) {
  if (std::isinf(b)) return true;
  if (std::isinf(a)) return false;
  return a <= b + 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace

SandwichReport sandwich_check(const LabeledDataset& dataset, int t,
                              const std::vector<JointQuery>& grid) {
  const int m = dataset.classes;
  const auto small = variety_cf(dataset, t);
  const auto variant = tensor_cf(dataset, t);
  const auto large = variety_cf(dataset, t + m - 1);

  SandwichReport report;
  for (const auto& query : grid) {
    if (query.y < 1 || query.y > m) throw DataError("sandwich query label outside 1..m");
    const double y = query.y;
    const double q_small = small.inverse_score(small.monomials(query.x, y));
    const double q_variant = variant.inverse_score(variant.monomials(query.x, y));
    const double q_large = large.inverse_score(large.monomials(query.x, y));
    ++report.checked;
    if (!ordered(q_small, q_variant) || !ordered(q_variant, q_large)) {
      report.violations.push_back({query, q_small, q_variant, q_large});
    }
  }
  return report;
}

}  // namespace christo
