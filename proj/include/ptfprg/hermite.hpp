#pragma once

/*
 * Polynomials of a standard Gaussian in the orthonormal Hermite basis.
 *
 * Convention: probabilists' Hermite polynomials He_j (weight
 * exp(-x^2/2)/sqrt(2 pi)), with the orthonormal multivariate basis
 *
 *     h_a(x) = prod_i He_{a_i}(x_i) / sqrt(a_i!)
 *
 * so that E[h_a(X) h_b(X)] = [a == b] for X ~ N(0, I).
 */

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "ptfprg/polynomial.hpp"

namespace ptfprg {

/// Monomial coefficients of He_j, lowest power first.
inline std::vector<double> hermite_1d(unsigned j) {
  std::vector<double> prev{1.0};
  if (j == 0) return prev;
  std::vector<double> cur{0.0, 1.0};
  for (unsigned m = 1; m < j; ++m) {
    // He_{m+1} = x He_m - m He_{m-1}
    std::vector<double> next(m + 2, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= static_cast<double>(m) * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

namespace detail {

/// table[m][j]: coefficient of He_j in x^m. Integer valued; built from
/// x He_j = He_{j+1} + j He_{j-1}.
inline std::vector<std::vector<double>> monomial_to_he_table(unsigned max_power) {
  std::vector<std::vector<double>> table(max_power + 1);
  table[0] = {1.0};
  for (unsigned m = 0; m < max_power; ++m) {
    std::vector<double> next(m + 2, 0.0);
    const auto& cur = table[m];
    for (std::size_t j = 0; j < cur.size(); ++j) {
      if (cur[j] == 0.0) continue;
      next[j + 1] += cur[j];
      if (j > 0) next[j - 1] += static_cast<double>(j) * cur[j];
    }
    table[m + 1] = std::move(next);
  }
  return table;
}

inline std::vector<std::vector<double>> he_to_monomial_table(unsigned max_index) {
  std::vector<std::vector<double>> table;
  table.reserve(max_index + 1);
  for (unsigned j = 0; j <= max_index; ++j) table.push_back(hermite_1d(j));
  return table;
}

inline std::vector<double> sqrt_factorials(unsigned max_index) {
  std::vector<double> out(max_index + 1, 1.0);
  double fact = 1.0;
  for (unsigned j = 1; j <= max_index; ++j) {
    fact *= j;
    out[j] = std::sqrt(fact);
  }
  return out;
}

inline unsigned max_exponent(const SparsePolynomial::TermMap& terms) {
  unsigned m = 0;
  for (const auto& [exps, coef] : terms) {
    for (unsigned e : exps) m = std::max(m, e);
  }
  return m;
}

/// Expands sum_t coef_t * prod_i basis[e_t,i] where basis[e] is a 1-D
/// coefficient vector, by iterating over the Cartesian product of supports.
template <typename Emit>
void expand_product(const Exponents& exps, const std::vector<std::vector<double>>& table,
                    double coef, Emit&& emit) {
  const std::size_t n = exps.size();
  Exponents index(n, 0);
  while (true) {
    double c = coef;
    for (std::size_t i = 0; i < n && c != 0.0; ++i) c *= table[exps[i]][index[i]];
    if (c != 0.0) emit(index, c);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++index[i] < table[exps[i]].size()) break;
      index[i] = 0;
    }
    if (i == n) break;
  }
}

}  // namespace detail

/// Coefficients c_a of a polynomial in the orthonormal basis h_a.
class HermiteExpansion {
 public:
  using CoeffMap = std::map<Exponents, double>;

  HermiteExpansion(std::size_t num_vars, CoeffMap coeffs)
      : num_vars_(num_vars), coeffs_(std::move(coeffs)) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
      if (it->first.size() != num_vars_) throw DimensionError("multi-index length != num_vars");
      it = it->second == 0.0 ? coeffs_.erase(it) : std::next(it);
    }
  }

  std::size_t num_vars() const noexcept { return num_vars_; }
  const CoeffMap& coeffs() const noexcept { return coeffs_; }

  double coefficient(const Exponents& a) const {
    auto it = coeffs_.find(a);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [a, c] : coeffs_) s += c * c;
    return s;
  }

 private:
  std::size_t num_vars_;
  CoeffMap coeffs_;
};

inline HermiteExpansion to_hermite(const SparsePolynomial& p) {
  const unsigned top = detail::max_exponent(p.terms());
  const auto table = detail::monomial_to_he_table(top);
  const auto sqrt_fact = detail::sqrt_factorials(top);
  HermiteExpansion::CoeffMap acc;
  for (const auto& [exps, coef] : p.terms()) {
    detail::expand_product(exps, table, coef, [&](const Exponents& a, double c) {
      double scale = 1.0;
      for (unsigned ai : a) scale *= sqrt_fact[ai];
      acc[a] += c * scale;
    });
  }
  return HermiteExpansion(p.num_vars(), std::move(acc));
}

inline SparsePolynomial from_hermite(const HermiteExpansion& h) {
  const unsigned top = detail::max_exponent(h.coeffs());
  const auto table = detail::he_to_monomial_table(top);
  const auto sqrt_fact = detail::sqrt_factorials(top);
  SparsePolynomial::TermMap acc;
  for (const auto& [a, coef] : h.coeffs()) {
    double scale = 1.0;
    for (unsigned ai : a) scale *= sqrt_fact[ai];
    detail::expand_product(a, table, coef / scale,
                           [&](const Exponents& e, double c) { acc[e] += c; });
  }
  return SparsePolynomial(h.num_vars(), acc);
}

/// Gaussian L2 norm |p|_2 = sqrt(E[p(X)^2]).
inline double l2_norm(const SparsePolynomial& p) { return std::sqrt(to_hermite(p).squared_norm()); }

/// Squared norms |p^[k]|_2^2 indexed by Hermite degree k = 0..deg p.
inline std::vector<double> degree_norms_squared(const SparsePolynomial& p) {
  std::vector<double> out(p.degree() + 1, 0.0);
  const HermiteExpansion h = to_hermite(p);
  for (const auto& [a, c] : h.coeffs()) out[total_degree(a)] += c * c;
  return out;
}

/// p^[k]: projection onto Hermite degree exactly k, in the monomial basis.
inline SparsePolynomial degree_part(const SparsePolynomial& p, unsigned k) {
  HermiteExpansion::CoeffMap part;
  const HermiteExpansion h = to_hermite(p);
  for (const auto& [a, c] : h.coeffs()) {
    if (total_degree(a) == k) part.emplace(a, c);
  }
  return from_hermite(HermiteExpansion(p.num_vars(), std::move(part)));
}

/// sum_k k(k-1)...(k-l+1) |p^[k]|_2^2, which equals the mean square of the
/// l-fold directional derivative of p at X along independent Gaussian
/// directions.
inline double derivative_moment_rhs(const SparsePolynomial& p, unsigned ell) {
  const auto norms = degree_norms_squared(p);
  double total = 0.0;
  for (unsigned k = 0; k < norms.size(); ++k) {
    double falling = 1.0;
    for (unsigned t = 0; t < ell; ++t) falling *= static_cast<double>(k) - t;
    total += falling * norms[k];
  }
  return total;
}

}  // namespace ptfprg
