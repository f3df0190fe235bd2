#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ptfprg/error.hpp"

namespace ptfprg {

using Exponents = std::vector<unsigned>;

inline unsigned total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}

/// Multivariate real polynomial stored in the monomial basis.
///
/// Terms with a zero coefficient are never stored; the zero polynomial has
/// no terms and degree 0. Values are immutable once constructed.
class SparsePolynomial {
 public:
  using TermMap = std::map<Exponents, double>;

  explicit SparsePolynomial(std::size_t num_vars) : num_vars_(num_vars) {
    if (num_vars_ == 0) throw ParameterError("polynomial needs at least one variable");
  }

  SparsePolynomial(std::size_t num_vars, const TermMap& terms) : SparsePolynomial(num_vars) {
    for (const auto& [exps, coef] : terms) accumulate(exps, coef);
  }

  SparsePolynomial(std::size_t num_vars, const std::vector<std::pair<Exponents, double>>& terms)
      : SparsePolynomial(num_vars) {
    for (const auto& [exps, coef] : terms) accumulate(exps, coef);
  }

  static SparsePolynomial constant(std::size_t num_vars, double c) {
    return SparsePolynomial(num_vars, TermMap{{Exponents(num_vars, 0), c}});
  }

  static SparsePolynomial variable(std::size_t num_vars, std::size_t i) {
    if (i >= num_vars) throw std::out_of_range("variable index out of range");
    Exponents e(num_vars, 0);
    e[i] = 1;
    return SparsePolynomial(num_vars, TermMap{{e, 1.0}});
  }

  std::size_t num_vars() const noexcept { return num_vars_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [exps, coef] : terms_) d = std::max(d, total_degree(exps));
    return d;
  }

  double coefficient(const Exponents& exps) const {
    auto it = terms_.find(exps);
    return it == terms_.end() ? 0.0 : it->second;
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != num_vars_) throw DimensionError("point dimension does not match polynomial");
    double value = 0.0;
    for (const auto& [exps, coef] : terms_) {
      double term = coef;
      for (std::size_t i = 0; i < num_vars_; ++i) {
        for (unsigned p = 0; p < exps[i]; ++p) term *= x[i];
      }
      value += term;
    }
    return value;
  }

  /// Partial derivative with respect to variable `i`.
  SparsePolynomial partial(std::size_t i) const {
    if (i >= num_vars_) throw std::out_of_range("variable index out of range");
    SparsePolynomial out(num_vars_);
    for (const auto& [exps, coef] : terms_) {
      if (exps[i] == 0) continue;
      Exponents e = exps;
      e[i] -= 1;
      out.accumulate(e, coef * exps[i]);
    }
    return out;
  }

  SparsePolynomial scaled(double c) const {
    SparsePolynomial out(num_vars_);
    if (c == 0.0) return out;
    for (const auto& [exps, coef] : terms_) out.accumulate(exps, coef * c);
    return out;
  }

  friend SparsePolynomial operator+(const SparsePolynomial& a, const SparsePolynomial& b) {
    check_same_vars(a, b);
    SparsePolynomial out = a;
    for (const auto& [exps, coef] : b.terms_) out.accumulate(exps, coef);
    return out;
  }

  friend SparsePolynomial operator-(const SparsePolynomial& a, const SparsePolynomial& b) {
    return a + b.scaled(-1.0);
  }

  friend SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b) {
    check_same_vars(a, b);
    SparsePolynomial out(a.num_vars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(a.num_vars_);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.accumulate(e, ca * cb);
      }
    }
    return out;
  }

  friend SparsePolynomial operator*(double c, const SparsePolynomial& p) { return p.scaled(c); }

  friend bool operator==(const SparsePolynomial&, const SparsePolynomial&) = default;

 private:
  static void check_same_vars(const SparsePolynomial& a, const SparsePolynomial& b) {
    if (a.num_vars_ != b.num_vars_) throw DimensionError("polynomials have different num_vars");
  }

  void accumulate(const Exponents& exps, double coef) {
    if (exps.size() != num_vars_) throw DimensionError("exponent vector length != num_vars");
    if (coef == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(exps, coef);
    if (!inserted) {
      it->second += coef;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  std::size_t num_vars_;
  TermMap terms_;
};

/// Flattened form of a SparsePolynomial for tight evaluation loops.
class FlatPolynomial {
 public:
  explicit FlatPolynomial(const SparsePolynomial& p)
      : num_vars_(p.num_vars()), max_exp_(0) {
    for (const auto& [exps, coef] : p.terms()) {
      coefs_.push_back(coef);
      exps_.insert(exps_.end(), exps.begin(), exps.end());
      for (unsigned e : exps) max_exp_ = std::max(max_exp_, e);
    }
  }

  std::size_t num_vars() const noexcept { return num_vars_; }

  /// `scratch` must hold at least scratch_size() doubles.
  std::size_t scratch_size() const noexcept { return num_vars_ * (max_exp_ + 1); }

  double evaluate(std::span<const double> x, std::span<double> scratch) const {
    const std::size_t stride = max_exp_ + 1;
    for (std::size_t i = 0; i < num_vars_; ++i) {
      double* pow = scratch.data() + i * stride;
      pow[0] = 1.0;
      for (unsigned e = 1; e <= max_exp_; ++e) pow[e] = pow[e - 1] * x[i];
    }
    double value = 0.0;
    const unsigned* e = exps_.data();
    for (double c : coefs_) {
      double term = c;
      for (std::size_t i = 0; i < num_vars_; ++i) term *= scratch[i * stride + e[i]];
      value += term;
      e += num_vars_;
    }
    return value;
  }

  double evaluate(std::span<const double> x) const {
    std::vector<double> scratch(scratch_size());
    return evaluate(x, scratch);
  }

 private:
  std::size_t num_vars_;
  unsigned max_exp_;
  std::vector<double> coefs_;
  std::vector<unsigned> exps_;
};

}  // namespace ptfprg
