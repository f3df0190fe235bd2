#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ptfprg/error.hpp"

namespace ptfprg {

/// E[X^j] for X ~ N(0,1): 0 for odd j, (j-1)!! for even j.
inline double gaussian_moment(unsigned j) {
  if (j % 2 == 1) return 0.0;
  double m = 1.0;
  for (unsigned i = j; i > 1; i -= 2) m *= static_cast<double>(i - 1);
  return m;
}

/// Discrete law on the real line whose low moments agree with N(0,1).
class Quadrature1D {
 public:
  Quadrature1D(std::vector<double> nodes, std::vector<double> weights)
      : nodes_(std::move(nodes)), weights_(std::move(weights)) {
    if (nodes_.empty() || nodes_.size() != weights_.size()) {
      throw ParameterError("quadrature needs matching non-empty node and weight lists");
    }
    for (double w : weights_) {
      if (!(w > 0.0)) throw ParameterError("quadrature weights must be positive");
    }
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  /// Highest polynomial degree integrated exactly by an M-point Gaussian rule.
  unsigned order() const noexcept { return static_cast<unsigned>(2 * nodes_.size() - 1); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double max_abs_node() const {
    double m = 0.0;
    for (double x : nodes_) m = std::max(m, std::abs(x));
    return m;
  }

  double moment(unsigned j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * std::pow(nodes_[i], j);
    return s;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson
// shifts. `diag` is overwritten by the eigenvalues, `off[i]` couples i and i+1.
inline void tridiagonal_eigenvalues(std::vector<double>& diag, std::vector<double> off) {
  const std::size_t n = diag.size();
  off.resize(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    for (int iter = 0;; ++iter) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(off[m]) <= 1e-16 * dd) break;
      }
      if (m == l) break;
      if (iter == 200) throw ParameterError("tridiagonal eigensolver did not converge");
      double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
      double r = std::hypot(g, 1.0);
      g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * off[i];
        const double b = c * off[i];
        r = std::hypot(f, g);
        off[i + 1] = r;
        if (r == 0.0) {
          diag[i + 1] -= p;
          off[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[i + 1] - p;
        r = (diag[i] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      diag[l] -= p;
      off[l] = g;
      off[m] = 0.0;
    }
  }
}

// Gauss weight at node x: 1 / sum_{j<count} h_j(x)^2 with h_j orthonormal.
inline double christoffel_weight(double x, std::size_t count) {
  double prev = 0.0, cur = 1.0, sum = 1.0;
  for (std::size_t j = 1; j < count; ++j) {
    const double next = (x * cur - std::sqrt(static_cast<double>(j - 1)) * prev) /
                        std::sqrt(static_cast<double>(j));
    prev = cur;
    cur = next;
    sum += cur * cur;
  }
  return 1.0 / sum;
}

// Newton refinement of a root of He_M using the monic recurrence.
inline double newton_hermite(double x, std::size_t m) {
  for (int iter = 0; iter < 8; ++iter) {
    double p0 = 1.0, p1 = x;
    if (m == 1) return 0.0;
    for (std::size_t j = 1; j < m; ++j) {
      const double p2 = x * p1 - static_cast<double>(j) * p0;
      p0 = p1;
      p1 = p2;
    }
    // He_M' = M He_{M-1}
    const double deriv = static_cast<double>(m) * p0;
    if (deriv == 0.0) break;
    const double step = p1 / deriv;
    x -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace detail

/// M-point Gauss-Hermite rule for the standard Gaussian (probabilists'
/// weight), normalized to a probability law. Exact for polynomials of degree
/// up to 2M-1. Nodes come from the Jacobi matrix with off-diagonal sqrt(j).
inline Quadrature1D gauss_hermite(unsigned m) {
  if (m < 1 || m > 64) throw ParameterError("gauss_hermite: M must be in [1, 64], got " + std::to_string(m));
  std::vector<double> nodes(m, 0.0);
  std::vector<double> off(m > 0 ? m - 1 : 0);
  for (unsigned j = 1; j < m; ++j) off[j - 1] = std::sqrt(static_cast<double>(j));
  detail::tridiagonal_eigenvalues(nodes, off);
  std::sort(nodes.begin(), nodes.end());

  for (double& x : nodes) x = detail::newton_hermite(x, m);

  // Enforce exact symmetry: average each +/- pair, pin the middle node to 0.
  for (unsigned i = 0; i < m / 2; ++i) {
    const double a = 0.5 * (std::abs(nodes[i]) + std::abs(nodes[m - 1 - i]));
    nodes[i] = -a;
    nodes[m - 1 - i] = a;
  }
  if (m % 2 == 1) nodes[m / 2] = 0.0;

  std::vector<double> weights(m);
  for (unsigned i = 0; i < m; ++i) weights[i] = detail::christoffel_weight(nodes[i], m);
  for (unsigned i = 0; i < m / 2; ++i) {
    const double w = 0.5 * (weights[i] + weights[m - 1 - i]);
    weights[i] = weights[m - 1 - i] = w;
  }
  double total = 0.0;
  for (unsigned i = 0; i < m / 2; ++i) total += 2.0 * weights[i];
  if (m % 2 == 1) total += weights[m / 2];
  for (double& w : weights) w /= total;
  return Quadrature1D(std::move(nodes), std::move(weights));
}

/// Fewest Gauss-Hermite points whose rule matches all moments up to `order`.
inline unsigned points_for_order(unsigned order) { return (order + 2) / 2; }

}  // namespace ptfprg
