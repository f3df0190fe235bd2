#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ptfprg/error.hpp"
#include "ptfprg/hermite.hpp"
#include "ptfprg/polynomial.hpp"
#include "ptfprg/random.hpp"

namespace ptfprg {

/// f(x) = sgn(p(x)) with sgn(0) = +1.
class PTF {
 public:
  explicit PTF(SparsePolynomial poly) : poly_(std::move(poly)) {}

  const SparsePolynomial& poly() const noexcept { return poly_; }
  std::size_t num_vars() const noexcept { return poly_.num_vars(); }
  unsigned degree() const { return poly_.degree(); }

 private:
  SparsePolynomial poly_;
};

inline int sign_of(double v) noexcept { return v >= 0.0 ? 1 : -1; }

inline int eval_ptf(const PTF& f, std::span<const double> x) {
  if (x.size() != f.num_vars()) throw DimensionError("point dimension does not match PTF");
  return sign_of(f.poly()(x));
}

struct RandomPolyConfig {
  std::size_t num_vars = 1;
  unsigned degree = 1;
  std::uint64_t rng_seed = 0;
};

/// All multi-indices a in Z_{>=0}^n with |a|_1 <= d, in graded lexicographic order.
inline std::vector<Exponents> multi_indices_up_to(std::size_t n, unsigned d) {
  std::vector<Exponents> out;
  Exponents a(n, 0);
  // Enumerate by total degree so the order (and therefore the RNG draw
  // order) is fixed.
  for (unsigned total = 0; total <= d; ++total) {
    std::vector<Exponents> level;
    auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
      if (i + 1 == n) {
        a[i] = left;
        level.push_back(a);
        return;
      }
      for (unsigned v = left + 1; v-- > 0;) {
        a[i] = v;
        self(self, i + 1, left - v);
      }
    };
    rec(rec, 0, total);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

/// Random PTF with i.i.d. N(0,1) Hermite coefficients on every |a|_1 <= d,
/// rescaled to |p|_2 = 1.
inline PTF random_ptf(const RandomPolyConfig& config) {
  if (config.num_vars == 0 || config.degree == 0) throw ParameterError("random_ptf needs n >= 1 and d >= 1");
  CounterRng rng(config.rng_seed, 0x70746600);
  HermiteExpansion::CoeffMap coeffs;
  double norm2 = 0.0;
  for (const auto& a : multi_indices_up_to(config.num_vars, config.degree)) {
    const double c = rng.normal();
    coeffs.emplace(a, c);
    norm2 += c * c;
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& [a, c] : coeffs) c *= scale;
  SparsePolynomial p = from_hermite(HermiteExpansion(config.num_vars, std::move(coeffs)));
  return PTF(p.scaled(1.0 / l2_norm(p)));
}

/// E[sgn(w.X - theta)] for X ~ N(0, I): 1 - 2 Phi(theta / |w|).
inline double halfspace_expectation(std::span<const double> w, double theta) {
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  if (!(norm2 > 0.0)) throw ParameterError("halfspace weight vector must be nonzero");
  return 1.0 - 2.0 * normal_cdf(theta / std::sqrt(norm2));
}

struct Halfspace {
  std::vector<double> w;
  double theta = 0.0;
};

/// Reads a degree-1 PTF sgn(c + w.x) as the halfspace (w, theta = -c).
inline std::optional<Halfspace> as_halfspace(const PTF& f) {
  if (f.degree() > 1) return std::nullopt;
  Halfspace h{std::vector<double>(f.num_vars(), 0.0), 0.0};
  for (const auto& [exps, coef] : f.poly().terms()) {
    const unsigned deg = total_degree(exps);
    if (deg == 0) {
      h.theta = -coef;
    } else {
      for (std::size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] == 1) h.w[i] = coef;
      }
    }
  }
  return h;
}

}  // namespace ptfprg
