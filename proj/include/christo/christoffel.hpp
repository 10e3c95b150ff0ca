#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "christo/moments.hpp"
#include "christo/multiindex.hpp"

namespace christo {

/// Eigenvalues at or below this are always discarded.
inline constexpr double kAbsoluteEigenFloor = 1e-12;
/// Default cutoff relative to the largest eigenvalue.
inline constexpr double kDefaultRelativeThreshold = 1e-10;
/// A monomial vector whose component off the retained eigenspace exceeds this fraction of
/// its norm is off-range: some polynomial vanishing on the sample is nonzero there.
inline constexpr double kOffRangeTolerance = 1e-8;

/// How near-null directions of a moment matrix are treated.
struct ThresholdPolicy {
  enum class Mode { relative, tikhonov };

  Mode mode = Mode::relative;
  /// Relative eigenvalue cutoff, or the jitter added to the diagonal in Tikhonov mode.
  double value = kDefaultRelativeThreshold;

  static ThresholdPolicy relative(double rel = kDefaultRelativeThreshold) {
    return {Mode::relative, rel};
  }
  static ThresholdPolicy tikhonov(double jitter) { return {Mode::tikhonov, jitter}; }

  /// Parses "rel:<float>" or "tikhonov:<float>"; throws UsageError otherwise.
  static ThresholdPolicy parse(std::string_view text);
  std::string to_string() const;

  bool operator==(const ThresholdPolicy&) const = default;
};

/// Spectral factorization of a moment matrix, restricted to its numerically nonzero part.
///
/// Lambda(x)^{-1} = sum_k (Q_k . v(x))^2 / lambda_k over the retained eigenpairs
/// (lambda_k, Q_k). When v(x) has a component outside span{Q_k} the variational infimum is
/// zero, so Lambda(x) = 0 and the inverse score is +infinity.
///
/// Immutable after construction; evaluation is safe from any number of threads.
class ChristoffelEvaluator {
public:
  ChristoffelEvaluator() = default;

  /// Assembles an evaluator from stored parts. Eigenvalues must be positive and descending,
  /// eigenvectors one column per eigenvalue. Throws NumericalError on inconsistent input.
  ChristoffelEvaluator(MonomialBasis basis, Eigen::VectorXd eigenvalues,
                       Eigen::MatrixXd eigenvectors, double threshold, double mass,
                       ThresholdPolicy policy, std::size_t support_size);

  const MonomialBasis& basis() const { return basis_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  std::size_t rank() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  double threshold() const { return threshold_; }
  double mass() const { return mass_; }
  const ThresholdPolicy& policy() const { return policy_; }
  std::size_t support_size() const { return support_size_; }

  /// lambda_max / lambda_min over the retained spectrum.
  double condition_number() const;

  /// True when v lies in the retained eigenspace up to kOffRangeTolerance.
  bool on_range(const Eigen::VectorXd& v) const;

  /// v^T M^+ v, or +infinity when v is off-range.
  double inverse_score(const Eigen::VectorXd& v) const;
  /// 1 / inverse_score(v), with 0 for off-range vectors.
  double value(const Eigen::VectorXd& v) const;

  /// Monomial vector of this evaluator's basis at x (plain) or (x, y) (joint kinds).
  Eigen::VectorXd monomials(std::span<const double> x) const;
  Eigen::VectorXd monomials(std::span<const double> x, double y) const;

private:
  MonomialBasis basis_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double threshold_ = 0.0;
  double mass_ = 1.0;
  ThresholdPolicy policy_;
  std::size_t support_size_ = 0;
};

/// Eigendecomposes M and keeps eigenvalues above max(kAbsoluteEigenFloor, rel * lambda_max),
/// or keeps everything after adding the Tikhonov jitter. Throws NumericalError when M is not
/// symmetric or nothing survives the cutoff.
ChristoffelEvaluator build_evaluator(const MomentMatrix& moments,
                                     ThresholdPolicy policy = ThresholdPolicy::relative());

/// Lambda_t(x) for a plain-basis evaluator.
double eval_cf(const ChristoffelEvaluator& evaluator, std::span<const double> x);
/// q_t(x) = Lambda_t(x)^{-1}; +infinity marks an off-range point.
double eval_cf_inverse(const ChristoffelEvaluator& evaluator, std::span<const double> x);

/// Result of min { p^T M p : p(x) = 1 }.
struct VariationalResult {
  /// The infimum, i.e. Lambda_t(x).
  double value = 0.0;
  /// Minimizer p* in the basis of M; a certificate with p(x) = 1 and p^T M p ~ 0 when
  /// the point is off-range.
  Eigen::VectorXd coefficients;
  bool off_range = false;
};

/// Solves the equality-constrained quadratic program through its stationarity system
/// M z = v (p* = z / v.z) with a rank-revealing complete orthogonal decomposition. When the
/// system is inconsistent, its least-squares residual lies in ker M and, normalized to
/// p(x) = 1, certifies Lambda = 0. Does not use the eigendecomposition path, so it serves as
/// an independent check of eval_cf.
VariationalResult variational_eval(const MomentMatrix& moments, std::span<const double> x);
VariationalResult variational_eval(const MomentMatrix& moments, const Eigen::VectorXd& v);

/// rank x size coefficient table; row k holds P_k = lambda_k^{-1/2} Q_k in the evaluator's basis.
Eigen::MatrixXd orthonormal_polynomials(const ChristoffelEvaluator& evaluator);

}  // namespace christo
