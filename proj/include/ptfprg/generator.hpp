#pragma once

/*
 * The PTF generator: a normalized geometric blend of l independent
 * K-wise independent Gaussian-quadrature designs,
 *
 *     Y = sum_{i=1}^{l} w_i Y_i,   w_i proportional to (1 - delta^2)^{(i-1)/2},
 *
 * with delta = eps^{1/3}, l = ceil(delta^-2 ln(eps^{-k(2d+1)})), and each Y_i
 * a design of order 10 d (3k + 3) discretized to statistical distance
 * eps^k / (n l) per coordinate.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptfprg/bitstream.hpp"
#include "ptfprg/design.hpp"
#include "ptfprg/error.hpp"

namespace ptfprg {

/// Largest number of blended designs accepted without an explicit cap.
inline constexpr std::uint64_t kMaxBlendTerms = std::uint64_t{1} << 31;

struct BlendWeights {
  double epsilon = 0.0;
  std::size_t ell = 0;
  std::vector<double> w;
};

/// w_i = (1 - eps^2)^{(i-1)/2} / sqrt(sum_{j=1}^{l} (1 - eps^2)^{j-1}), so sum w_i^2 = 1.
inline BlendWeights blend_weights(double epsilon, std::size_t ell) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("blend epsilon must lie in (0, 1)");
  if (ell == 0) throw ParameterError("blend needs at least one term");
  const double decay = std::sqrt(1.0 - epsilon * epsilon);
  BlendWeights out{epsilon, ell, std::vector<double>(ell)};
  double w = 1.0, norm2 = 0.0;
  for (std::size_t i = 0; i < ell; ++i) {
    out.w[i] = w;
    norm2 += w * w;
    w *= decay;
  }
  const double z = std::sqrt(norm2);
  for (double& v : out.w) v /= z;
  return out;
}

struct GeneratorConfig {
  std::size_t n = 0;
  unsigned d = 0;
  unsigned k = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t ell = 0;
  std::uint64_t ell_formula = 0;  // before the cap
  std::optional<std::size_t> ell_cap;
  unsigned design_order = 0;
  unsigned points = 0;  // quadrature atoms M
  double tv_budget = 0.0;
  DesignSampler sampler;
  /// Start bit of each design's seed within the master bitstream.
  std::vector<std::size_t> seed_offsets;
  BlendWeights weights;

  bool truncated() const { return ell_cap && ell < ell_formula; }
};

/// l = ceil(delta^-2 ln(eps^{-k(2d+1)})) computed with natural log.
inline std::uint64_t blend_length(double epsilon, unsigned d, unsigned k) {
  const double delta = std::cbrt(epsilon);
  const double raw = std::ceil(static_cast<double>(k) * (2.0 * d + 1.0) * std::log(1.0 / epsilon) / (delta * delta));
  if (!(raw < static_cast<double>(kMaxBlendTerms))) {
    throw ParameterError("blend length overflows; set ell_cap");
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(raw));
}

inline unsigned design_order_for(unsigned d, unsigned k) { return 10 * d * (3 * k + 3); }

inline GeneratorConfig plan(std::size_t n, unsigned d, unsigned k, double epsilon,
                            std::optional<std::size_t> ell_cap = std::nullopt) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (d < 1 || k < 1) throw ParameterError("d and k must be positive");
  if (n < 1) throw ParameterError("n must be positive");
  if (ell_cap && *ell_cap == 0) throw ParameterError("ell_cap must be positive");

  const double delta = std::cbrt(epsilon);
  std::uint64_t ell_formula = 0;
  if (ell_cap) {
    try {
      ell_formula = blend_length(epsilon, d, k);
    } catch (const ParameterError&) {
      ell_formula = kMaxBlendTerms;
    }
  } else {
    ell_formula = blend_length(epsilon, d, k);
  }
  const std::size_t ell = ell_cap ? std::min<std::size_t>(ell_formula, *ell_cap) : ell_formula;
  const unsigned order = design_order_for(d, k);
  const unsigned points = points_for_order(order);
  if (points > 64) throw ParameterError("design order needs more than 64 quadrature points");
  const double tv_budget = std::pow(epsilon, static_cast<double>(k)) / (static_cast<double>(n) * static_cast<double>(ell));

  DesignSampler sampler = build_sampler(points, order, n, tv_budget);
  std::vector<std::size_t> offsets(ell);
  for (std::size_t i = 0; i < ell; ++i) offsets[i] = i * sampler.stream_bits();
  return GeneratorConfig{n,     d,        k,         epsilon,  delta,          ell,
                         ell_formula, ell_cap, order, points, tv_budget, std::move(sampler),
                         std::move(offsets), blend_weights(delta, ell)};
}

/// ell * K * (ceil(log2 q) + 16).
inline std::size_t total_seed_bits(const GeneratorConfig& config) {
  return config.ell * config.sampler.stream_bits();
}

/// Closed-form factors of the seed length, for reporting.
struct SeedAccounting {
  std::size_t ell = 0;
  std::size_t independence = 0;
  unsigned symbol_bits = 0;
  unsigned block_bits = 0;
  std::size_t design_seed_bits = 0;  // K * ceil(log2 q)
  std::size_t total_bits = 0;        // ell * K * block_bits
  double log_n_over_eps_times_ell = 0.0;
  double log_n_over_eps = 0.0;  // log2(n) / eps
};

inline SeedAccounting seed_accounting(const GeneratorConfig& config) {
  SeedAccounting a;
  a.ell = config.ell;
  a.independence = config.sampler.independence();
  a.symbol_bits = config.sampler.symbol_bits();
  a.block_bits = config.sampler.block_bits();
  a.design_seed_bits = seed_bits(config.sampler);
  a.total_bits = total_seed_bits(config);
  const double n = static_cast<double>(config.n);
  a.log_n_over_eps_times_ell = std::log2(n / config.epsilon) * static_cast<double>(config.ell);
  a.log_n_over_eps = std::log2(std::max(2.0, n)) / config.epsilon;
  return a;
}

/// Writes the generator output for `master` into `out`; reuses `seed` and
/// `design` as scratch to keep batch loops allocation-free.
inline void sample_into(const GeneratorConfig& config, const BitStream& master, std::span<double> out,
                        std::vector<std::uint64_t>& seed, std::vector<double>& design) {
  if (master.size() < total_seed_bits(config)) {
    throw ParameterError("insufficient seed bits: need " + std::to_string(total_seed_bits(config)) + ", have " +
                         std::to_string(master.size()));
  }
  std::fill(out.begin(), out.end(), 0.0);
  design.resize(config.n);
  seed.resize(config.sampler.independence());
  for (std::size_t i = 0; i < config.ell; ++i) {
    read_seed_into(config.sampler, master, config.seed_offsets[i], seed);
    design_sample_into(config.sampler, seed, design);
    const double w = config.weights.w[i];
    for (std::size_t c = 0; c < config.n; ++c) out[c] += w * design[c];
  }
}

inline std::vector<double> sample(const GeneratorConfig& config, const BitStream& master) {
  std::vector<double> out(config.n);
  std::vector<std::uint64_t> seed;
  std::vector<double> design;
  sample_into(config, master, out, seed, design);
  return out;
}

/// Coefficients of the iterated hybrid: eps (1-eps^2)^{(i-1)/2} for the ell
/// designs followed by (1-eps^2)^{ell/2} for the Gaussian term. Their squares
/// sum to one.
inline std::vector<double> hybrid_coefficients(double epsilon, std::size_t ell) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  const double decay = std::sqrt(1.0 - epsilon * epsilon);
  std::vector<double> c(ell + 1);
  double pw = 1.0;
  for (std::size_t i = 0; i < ell; ++i) {
    c[i] = epsilon * pw;
    pw *= decay;
  }
  c[ell] = pw;
  return c;
}

/// sum_{i=1}^{ell} eps (1-eps^2)^{(i-1)/2} Y_i + (1-eps^2)^{ell/2} x, where the
/// Y_i come from consecutive stream_bits() ranges of `master` and `gaussian`
/// is an externally drawn N(0, I) vector.
inline std::vector<double> prop9_hybrid_sample(double epsilon, std::size_t ell, const DesignSampler& sampler,
                                               const BitStream& master, std::span<const double> gaussian) {
  if (gaussian.size() != sampler.dimension()) throw DimensionError("gaussian draw has wrong dimension");
  const auto coef = hybrid_coefficients(epsilon, ell);
  std::vector<double> out(gaussian.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = coef[ell] * gaussian[c];
  std::vector<double> design(sampler.dimension());
  for (std::size_t i = 0; i < ell; ++i) {
    const auto seed = read_seed(sampler, master, i * sampler.stream_bits());
    design_sample_into(sampler, seed, design);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += coef[i] * design[c];
  }
  return out;
}

}  // namespace ptfprg
