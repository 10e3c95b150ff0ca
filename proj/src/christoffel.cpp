#include "christo/christoffel.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "christo/errors.hpp"

namespace christo {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double parse_double(std::string_view text, std::string_view context) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw UsageError("cannot parse number '" + std::string(text) + "' in " + std::string(context));
  }
  return value;
}

}  // namespace

ThresholdPolicy ThresholdPolicy::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw UsageError("threshold policy must be rel:<float> or tikhonov:<float>, got '" +
                     std::string(text) + "'");
  }
  const auto mode = text.substr(0, colon);
  const double value = parse_double(text.substr(colon + 1), "threshold policy");
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw UsageError("threshold policy value must be positive and finite");
  }
  if (mode == "rel") return relative(value);
  if (mode == "tikhonov") return tikhonov(value);
  throw UsageError("unknown threshold policy mode '" + std::string(mode) + "'");
}

std::string ThresholdPolicy::to_string() const {
  std::ostringstream out;
  out.precision(17);
  out << (mode == Mode::relative ? "rel:" : "tikhonov:") << value;
  return out.str();
}

ChristoffelEvaluator::ChristoffelEvaluator(MonomialBasis basis, Eigen::VectorXd eigenvalues,
                                           Eigen::MatrixXd eigenvectors, double threshold,
                                           double mass, ThresholdPolicy policy,
                                           std::size_t support_size)
    : basis_(std::move(basis)),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      threshold_(threshold),
      mass_(mass),
      policy_(policy),
      support_size_(support_size) {
  if (eigenvalues_.size() == 0) throw NumericalError("evaluator has no retained eigenpairs");
  if (eigenvectors_.rows() != static_cast<Eigen::Index>(basis_.size()) ||
      eigenvectors_.cols() != eigenvalues_.size()) {
    throw NumericalError("eigenvector table does not match basis size and rank");
  }
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    if (!(eigenvalues_[k] > 0.0) || !std::isfinite(eigenvalues_[k])) {
      throw NumericalError("retained eigenvalues must be positive and finite");
    }
    if (k > 0 && eigenvalues_[k] > eigenvalues_[k - 1]) {
      throw NumericalError("retained eigenvalues must be sorted in descending order");
    }
  }
}

double ChristoffelEvaluator::condition_number() const {
  return eigenvalues_[0] / eigenvalues_[eigenvalues_.size() - 1];
}

bool ChristoffelEvaluator::on_range(const Eigen::VectorXd& v) const {
  const Eigen::VectorXd coords = eigenvectors_.transpose() * v;
  const double residual = (v - eigenvectors_ * coords).norm();
  return residual <= kOffRangeTolerance * v.norm();
}

double ChristoffelEvaluator::inverse_score(const Eigen::VectorXd& v) const {
  if (v.size() != static_cast<Eigen::Index>(basis_.size())) {
    throw DataError("monomial vector length does not match evaluator basis");
  }
  const Eigen::VectorXd coords = eigenvectors_.transpose() * v;
  const double residual = (v - eigenvectors_ * coords).norm();
  if (residual > kOffRangeTolerance * v.norm()) return kInfinity;
  return (coords.array().square() / eigenvalues_.array()).sum();
}

double ChristoffelEvaluator::value(const Eigen::VectorXd& v) const {
  const double q = inverse_score(v);
  return std::isinf(q) ? 0.0 : 1.0 / q;
}

Eigen::VectorXd ChristoffelEvaluator::monomials(std::span<const double> x) const {
  return eval_monomials(basis_, x);
}

Eigen::VectorXd ChristoffelEvaluator::monomials(std::span<const double> x, double y) const {
  return eval_joint_monomials(basis_, x, y);
}

ChristoffelEvaluator build_evaluator(const MomentMatrix& moments, ThresholdPolicy policy) {
  const Eigen::MatrixXd& m = moments.entries;
  const auto size = static_cast<Eigen::Index>(moments.basis.size());
  if (m.rows() != size || m.cols() != size) {
    throw NumericalError("moment matrix shape does not match its basis");
  }
  if (!m.allFinite()) throw NumericalError("moment matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NumericalError("moment matrix is not symmetric");
  }

  Eigen::MatrixXd work = m;
  if (policy.mode == ThresholdPolicy::Mode::tikhonov) {
    work.diagonal().array() += policy.value;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(work);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition did not converge");

  // Eigen returns ascending order.
  const Eigen::VectorXd ascending = solver.eigenvalues();
  const double lambda_max = ascending[size - 1];
  const double threshold = policy.mode == ThresholdPolicy::Mode::tikhonov
                               ? 0.0
                               : std::max(kAbsoluteEigenFloor, policy.value * lambda_max);

  Eigen::Index kept = 0;
  while (kept < size && ascending[size - 1 - kept] > threshold) ++kept;
  if (kept == 0) {
    throw NumericalError("moment matrix is degenerate: no eigenvalue above " +
                         std::to_string(threshold));
  }

  Eigen::VectorXd values(kept);
  Eigen::MatrixXd vectors(size, kept);
  for (Eigen::Index k = 0; k < kept; ++k) {
    values[k] = ascending[size - 1 - k];
    vectors.col(k) = solver.eigenvectors().col(size - 1 - k);
  }
  return ChristoffelEvaluator(moments.basis, std::move(values), std::move(vectors), threshold,
                              moments.mass, policy, moments.support_size);
}

double eval_cf(const ChristoffelEvaluator& evaluator, std::span<const double> x) {
  return evaluator.value(evaluator.monomials(x));
}

double eval_cf_inverse(const ChristoffelEvaluator& evaluator, std::span<const double> x) {
  return evaluator.inverse_score(evaluator.monomials(x));
}

VariationalResult variational_eval(const MomentMatrix& moments, std::span<const double> x) {
  return variational_eval(moments, eval_monomials(moments.basis, x));
}

VariationalResult variational_eval(const MomentMatrix& moments, const Eigen::VectorXd& v) {
  const Eigen::MatrixXd& m = moments.entries;
  const Eigen::Index s = m.rows();
  if (v.size() != s) throw DataError("monomial vector length does not match moment matrix");
  const double v_norm = v.norm();
  if (!(v_norm > 0.0)) throw DataError("monomial vector is zero");

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  // Far below the evaluator's eigenvalue cut: only rounding-level pivots are dropped.
  cod.setThreshold(1e-13);
  cod.compute(m);
  const Eigen::VectorXd z = cod.solve(v);
  const Eigen::VectorXd residual = v - m * z;

  VariationalResult result;
  if (residual.norm() > kOffRangeTolerance * v_norm) {
    // The least-squares residual is orthogonal to range(M) = (ker M)^perp.
    result.off_range = true;
    result.value = 0.0;
    result.coefficients = residual / residual.dot(v);
    return result;
  }
  const double q = v.dot(z);
  if (!(q > 0.0)) throw NumericalError("stationarity solve produced a non-positive v^T M^+ v");
  result.value = 1.0 / q;
  result.coefficients = z * result.value;
  return result;
}

Eigen::MatrixXd orthonormal_polynomials(const ChristoffelEvaluator& evaluator) {
  const Eigen::VectorXd scale = evaluator.eigenvalues().array().rsqrt();
  return scale.asDiagonal() * evaluator.eigenvectors().transpose();
}

}  // namespace christo
