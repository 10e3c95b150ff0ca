#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace christo {

/// Exponent vector alpha of the monomial x^alpha.
struct MultiIndex {
  std::vector<int> exponents;

  int degree() const;
  bool operator==(const MultiIndex&) const = default;
};

/// One monomial x^alpha * y^k. Plain bases always have k == 0.
struct BasisTerm {
  MultiIndex x;
  int y_power = 0;

  int total_degree() const { return x.degree() + y_power; }
  bool operator==(const BasisTerm&) const = default;
};

enum class BasisKind {
  plain,    // all x^alpha with |alpha| <= t
  variety,  // x^alpha y^k with k <= m-1 and |alpha| + k <= t
  tensor,   // x^alpha y^k with |alpha| <= t and k <= m-1
};

const char* to_string(BasisKind kind);

/// Ordered monomial basis. Terms are in graded lexicographic order (total degree first,
/// then descending lexicographic order on (alpha_1, ..., alpha_n, k)), so x_1 outranks x_2
/// and y comes last. Every matrix and vector indexed by a basis uses this order.
class MonomialBasis {
public:
  MonomialBasis() = default;

  BasisKind kind() const { return kind_; }
  int dimension() const { return n_; }
  int degree() const { return t_; }
  /// Number of classes m for joint kinds; 1 for plain bases.
  int classes() const { return m_; }
  bool is_joint() const { return kind_ != BasisKind::plain; }

  std::size_t size() const { return terms_.size(); }
  const std::vector<BasisTerm>& terms() const { return terms_; }
  const BasisTerm& operator[](std::size_t i) const { return terms_[i]; }

  /// Largest exponent of any single variable, used to size power tables.
  int max_exponent() const;

  bool operator==(const MonomialBasis&) const = default;

private:
  friend MonomialBasis enumerate_basis(int, int);
  friend MonomialBasis enumerate_variety_basis(int, int, int);
  friend MonomialBasis enumerate_tensor_basis(int, int, int);

  BasisKind kind_ = BasisKind::plain;
  int n_ = 0;
  int t_ = 0;
  int m_ = 1;
  std::vector<BasisTerm> terms_;
};

/// C(n, k) as an exact integer.
std::size_t binomial(int n, int k);

/// s(t) = C(n + t, n), the number of monomials of degree at most t in n variables.
std::size_t polynomial_space_dim(int n, int t);

MonomialBasis enumerate_basis(int n, int t);
MonomialBasis enumerate_variety_basis(int n, int t, int m);
MonomialBasis enumerate_tensor_basis(int n, int t, int m);

/// v_t(x). Throws DataError on dimension mismatch, non-finite input or a joint basis.
Eigen::VectorXd eval_monomials(const MonomialBasis& basis, std::span<const double> x);

/// Joint monomial vector (x^alpha y^k) for variety and tensor bases.
Eigen::VectorXd eval_joint_monomials(const MonomialBasis& basis, std::span<const double> x,
                                     double y);

}  // namespace christo
