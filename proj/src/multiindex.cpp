#include "christo/multiindex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "christo/errors.hpp"
#include "christo/log.hpp"

namespace christo {

int MultiIndex::degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

const char* to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::plain:
      return "plain";
    case BasisKind::variety:
      return "variety";
    case BasisKind::tensor:
      return "tensor";
  }
  return "unknown";
}

int MonomialBasis::max_exponent() const {
  int result = 0;
  for (const auto& term : terms_) {
    for (int e : term.x.exponents) result = std::max(result, e);
    result = std::max(result, term.y_power);
  }
  return result;
}

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // exact at every step: result * (n - k + i) is divisible by i
    result = result * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  }
  return result;
}

std::size_t polynomial_space_dim(int n, int t) { return binomial(n + t, n); }

namespace {

// Appends every exponent vector of length `slots` summing to `total`, in descending
// lexicographic order.
void compositions(int total, std::size_t slots, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  const std::size_t pos = current.size();
  if (pos + 1 == slots) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int e = total; e >= 0; --e) {
    current.push_back(e);
    compositions(total - e, slots, current, out);
    current.pop_back();
  }
}

// Graded-lex enumeration of (alpha, k) with total degree <= max_total, keeping the
// terms accepted by `keep`.
template <typename Keep>
std::vector<BasisTerm> graded_terms(int n, int max_total, bool with_y, Keep keep) {
  std::vector<BasisTerm> terms;
  const std::size_t slots = static_cast<std::size_t>(n) + (with_y ? 1 : 0);
  for (int d = 0; d <= max_total; ++d) {
    std::vector<std::vector<int>> level;
    std::vector<int> scratch;
    compositions(d, slots, scratch, level);
    for (auto& exps : level) {
      BasisTerm term;
      if (with_y) {
        term.y_power = exps.back();
        exps.pop_back();
      }
      term.x.exponents = std::move(exps);
      if (keep(term)) terms.push_back(std::move(term));
    }
  }
  return terms;
}

void check_dims(int n, int t) {
  if (n < 1) throw UsageError("basis dimension must be >= 1, got " + std::to_string(n));
  if (t < 0) throw UsageError("basis degree must be >= 0, got " + std::to_string(t));
}

void check_classes(int m) {
  if (m < 1) throw UsageError("class count must be >= 1, got " + std::to_string(m));
}

std::vector<double> powers(double v, int max_exp) {
  std::vector<double> p(static_cast<std::size_t>(max_exp) + 1);
  p[0] = 1.0;  // 0^0 = 1
  for (int e = 1; e <= max_exp; ++e) p[e] = p[e - 1] * v;
  return p;
}

void check_point(const MonomialBasis& basis, std::span<const double> x) {
  if (static_cast<int>(x.size()) != basis.dimension()) {
    throw DataError("point has dimension " + std::to_string(x.size()) + ", basis expects " +
                    std::to_string(basis.dimension()));
  }
  for (double c : x) {
    if (!std::isfinite(c)) throw DataError("non-finite coordinate in query point");
  }
}

Eigen::VectorXd evaluate(const MonomialBasis& basis, std::span<const double> x, double y) {
  const int max_exp = basis.max_exponent();
  std::vector<std::vector<double>> table;
  table.reserve(x.size());
  for (double c : x) table.push_back(powers(c, max_exp));
  const auto y_pow = powers(y, max_exp);

  Eigen::VectorXd v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& term = basis[i];
    double value = y_pow[term.y_power];
    for (std::size_t c = 0; c < x.size(); ++c) value *= table[c][term.x.exponents[c]];
    v[static_cast<Eigen::Index>(i)] = value;
  }
  return v;
}

}  // namespace

MonomialBasis enumerate_basis(int n, int t) {
  check_dims(n, t);
  MonomialBasis b;
  b.kind_ = BasisKind::plain;
  b.n_ = n;
  b.t_ = t;
  b.m_ = 1;
  b.terms_ = graded_terms(n, t, false, [](const BasisTerm&) { return true; });
  return b;
}

MonomialBasis enumerate_variety_basis(int n, int t, int m) {
  check_dims(n, t);
  check_classes(m);
  if (t < m - 1) {
    warn("variety basis with t=" + std::to_string(t) + " < m-1=" + std::to_string(m - 1) +
         " cannot separate all classes");
  }
  MonomialBasis b;
  b.kind_ = BasisKind::variety;
  b.n_ = n;
  b.t_ = t;
  b.m_ = m;
  b.terms_ = graded_terms(n, t, true, [m](const BasisTerm& term) { return term.y_power <= m - 1; });
  return b;
}

MonomialBasis enumerate_tensor_basis(int n, int t, int m) {
  check_dims(n, t);
  check_classes(m);
  MonomialBasis b;
  b.kind_ = BasisKind::tensor;
  b.n_ = n;
  b.t_ = t;
  b.m_ = m;
  b.terms_ = graded_terms(n, t + m - 1, true, [t, m](const BasisTerm& term) {
    return term.y_power <= m - 1 && term.x.degree() <= t;
  });
  return b;
}

Eigen::VectorXd eval_monomials(const MonomialBasis& basis, std::span<const double> x) {
  if (basis.is_joint()) {
    throw DataError(std::string("eval_monomials needs a plain basis, got ") +
                    to_string(basis.kind()));
  }
  check_point(basis, x);
  return evaluate(basis, x, 1.0);
}

Eigen::VectorXd eval_joint_monomials(const MonomialBasis& basis, std::span<const double> x,
                                     double y) {
  if (!basis.is_joint()) throw DataError("eval_joint_monomials needs a variety or tensor basis");
  check_point(basis, x);
  if (!std::isfinite(y)) throw DataError("non-finite label coordinate in query point");
  return evaluate(basis, x, y);
}

}  // namespace christo
