#pragma once

/*
 * Finite-seed n-dimensional moment designs.
 *
 * A DesignSampler composes three pieces:
 *   - a Gauss-Hermite rule (the 1-D design, M atoms),
 *   - a K-wise independent family over F_q (one field element per coordinate),
 *   - integer cutoffs that partition F_q into M intervals whose sizes are the
 *     atom weights rounded to multiples of 1/q.
 *
 * Each coordinate is therefore within statistical distance M/q of the atom
 * law, and any K coordinates are independent.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ptfprg/bitstream.hpp"
#include "ptfprg/error.hpp"
#include "ptfprg/kwise.hpp"
#include "ptfprg/parallel.hpp"
#include "ptfprg/quadrature.hpp"
#include "ptfprg/random.hpp"

namespace ptfprg {

/// Extra bits per field symbol drawn from the master bitstream; the mod-q
/// reduction bias is then at most 2^-16 per symbol.
inline constexpr unsigned kSymbolSlackBits = 16;

/// Cumulative cutoffs t_0 <= ... <= t_{M-1} = q with t_j - t_{j-1}
/// the largest-remainder rounding of w_j * q. Ties in the remainder go to
/// the higher atom index. Every interval size is within one unit of w_j * q.
inline std::vector<std::uint64_t> proportional_thresholds(std::span<const double> weights, std::uint64_t q) {
  const std::size_t m = weights.size();
  std::vector<std::uint64_t> counts(m);
  std::vector<double> remainders(m);
  std::uint64_t assigned = 0;
  const long double scale = static_cast<long double>(q);
  for (std::size_t j = 0; j < m; ++j) {
    const long double exact = static_cast<long double>(weights[j]) * scale;
    const long double fl = std::floor(exact);
    counts[j] = static_cast<std::uint64_t>(fl);
    remainders[j] = static_cast<double>(exact - fl);
    assigned += counts[j];
  }
  if (assigned > q) throw ParameterError("atom weights sum above one");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
    return a > b;
  });
  std::uint64_t leftover = q - assigned;
  if (leftover > m) throw ParameterError("atom weights sum well below one");
  for (std::size_t i = 0; i < leftover; ++i) ++counts[order[i]];
  std::vector<std::uint64_t> thresholds(m);
  std::uint64_t running = 0;
  for (std::size_t j = 0; j < m; ++j) {
    running += counts[j];
    thresholds[j] = running;
  }
  return thresholds;
}

class DesignSampler {
 public:
  DesignSampler(Quadrature1D quadrature, KWiseFamily family)
      : quadrature_(std::move(quadrature)),
        family_(std::move(family)),
        thresholds_(proportional_thresholds(quadrature_.weights(), family_.q())) {}

  const Quadrature1D& quadrature() const noexcept { return quadrature_; }
  const KWiseFamily& family() const noexcept { return family_; }
  const std::vector<std::uint64_t>& thresholds() const noexcept { return thresholds_; }

  std::size_t dimension() const noexcept { return family_.size(); }
  std::size_t independence() const noexcept { return family_.independence(); }
  std::uint64_t q() const noexcept { return family_.q(); }
  std::size_t atoms() const noexcept { return quadrature_.size(); }

  /// Per-coordinate statistical distance bound M/q.
  double tv_bound() const noexcept {
    return static_cast<double>(atoms()) / static_cast<double>(q());
  }

  /// Exact per-coordinate statistical distance to the atom law.
  double exact_tv() const {
    double total = 0.0;
    std::uint64_t prev = 0;
    for (std::size_t j = 0; j < atoms(); ++j) {
      const double mass = static_cast<double>(thresholds_[j] - prev) / static_cast<double>(q());
      total += std::abs(mass - quadrature_.weights()[j]);
      prev = thresholds_[j];
    }
    return 0.5 * total;
  }

  std::uint64_t atom_count(std::size_t j) const noexcept {
    return thresholds_[j] - (j == 0 ? 0 : thresholds_[j - 1]);
  }

  unsigned symbol_bits() const { return ceil_log2(q()); }
  unsigned block_bits() const { return symbol_bits() + kSymbolSlackBits; }
  /// Bits drawn from a master bitstream to produce one seed.
  std::size_t stream_bits() const { return independence() * block_bits(); }

  std::size_t atom_index(std::uint64_t field_value) const noexcept {
    return static_cast<std::size_t>(
        std::upper_bound(thresholds_.begin(), thresholds_.end(), field_value) - thresholds_.begin());
  }

  double node_for(std::uint64_t field_value) const noexcept {
    return quadrature_.nodes()[atom_index(field_value)];
  }

 private:
  Quadrature1D quadrature_;
  KWiseFamily family_;
  std::vector<std::uint64_t> thresholds_;
};

/// Smallest prime q >= max(n+1, ceil(M / tv_budget)) and the sampler over it.
inline DesignSampler build_sampler(unsigned m, std::size_t independence, std::size_t n, double tv_budget) {
  if (!(tv_budget > 0.0)) throw ParameterError("tv_budget must be positive");
  if (n == 0) throw ParameterError("design dimension must be positive");
  const long double needed = std::ceil(static_cast<long double>(m) / static_cast<long double>(tv_budget));
  if (needed > static_cast<long double>(kMaxModulus)) {
    throw ParameterError("tv_budget too small: field size would exceed 2^62");
  }
  const std::uint64_t lower = std::max<std::uint64_t>(n + 1, static_cast<std::uint64_t>(needed));
  const std::uint64_t q = next_prime(lower);
  if (q > kMaxModulus) throw ParameterError("tv_budget too small: field size would exceed 2^62");
  return DesignSampler(gauss_hermite(m), KWiseFamily::standard(q, independence, n));
}

/// Information content of one seed: K * ceil(log2 q).
inline std::size_t seed_bits(const DesignSampler& sampler) {
  return sampler.independence() * sampler.symbol_bits();
}

/// Reads one seed from `bits` starting at `offset` into `seed`: K blocks of
/// ceil(log2 q) + 16 bits, each reduced mod q.
inline void read_seed_into(const DesignSampler& sampler, const BitStream& bits, std::size_t offset,
                           std::span<std::uint64_t> seed) {
  if (offset + sampler.stream_bits() > bits.size()) {
    throw ParameterError("insufficient seed bits: need " + std::to_string(offset + sampler.stream_bits()) +
                         ", have " + std::to_string(bits.size()));
  }
  if (seed.size() != sampler.independence()) throw ParameterError("seed buffer has wrong length");
  const unsigned block = sampler.block_bits();
  const Modulus& mod = sampler.family().modulus();
  std::size_t pos = offset;
  for (auto& s : seed) {
    if (block <= 64) {
      s = mod.reduce(bits.read(pos, block));
    } else {
      const unsigned high = block - 64;
      const unsigned __int128 v =
          (static_cast<unsigned __int128>(bits.read(pos, high)) << 64) | bits.read(pos + high, 64);
      s = static_cast<std::uint64_t>(v % mod.value());
    }
    pos += block;
  }
}

inline std::vector<std::uint64_t> read_seed(const DesignSampler& sampler, const BitStream& bits, std::size_t offset) {
  std::vector<std::uint64_t> seed(sampler.independence());
  read_seed_into(sampler, bits, offset, seed);
  return seed;
}

/// Writes the n design coordinates for `seed` into `out` (no checks).
inline void design_sample_into(const DesignSampler& sampler, std::span<const std::uint64_t> seed,
                               std::span<double> out) {
  const KWiseFamily& family = sampler.family();
  for (std::size_t i = 0; i < family.size(); ++i) out[i] = sampler.node_for(family.eval_unchecked(seed, i));
}

inline std::vector<double> design_sample(const DesignSampler& sampler, std::span<const std::uint64_t> seed) {
  sampler.family().check_seed(seed);
  std::vector<double> out(sampler.dimension());
  design_sample_into(sampler, seed, out);
  return out;
}

// ---------------------------------------------------------------------------
// Moment verification

enum class MomentMode { exhaustive, monte_carlo };

struct MomentCheck {
  std::string label;       // e.g. "E[Y0^4]" or "E[Y0^2 Y1^2]"
  unsigned order = 0;      // total degree of the monomial
  double value = 0.0;
  double target = 0.0;
  double bound = 0.0;      // allowed |value - target|
  double stderr_ = 0.0;    // zero in exhaustive mode
  bool within_design_order = true;
  bool pass = false;
};

struct MomentReport {
  MomentMode mode = MomentMode::exhaustive;
  std::uint64_t seeds_examined = 0;
  double tv_bound = 0.0;
  double exact_tv = 0.0;
  std::vector<MomentCheck> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const MomentCheck& c) { return c.pass; });
  }
};

namespace detail {

inline double ipow(double x, unsigned p) {
  double r = 1.0;
  for (unsigned i = 0; i < p; ++i) r *= x;
  return r;
}

inline bool within(double value, double target, double bound) {
  return std::abs(value - target) <= bound + 1e-12 * std::max(1.0, std::abs(target));
}

// Sum_j counts[j] * node_j^p / total, pairing mirrored atoms so that a
// symmetric count vector gives exactly zero for odd p.
inline double atom_moment(const Quadrature1D& quad, std::span<const std::uint64_t> counts, unsigned p,
                          double total) {
  const auto& x = quad.nodes();
  const std::size_t m = x.size();
  double s = 0.0;
  for (std::size_t j = 0; j < m / 2; ++j) {
    const std::size_t k = m - 1 - j;
    s += static_cast<double>(counts[j]) * ipow(x[j], p) + static_cast<double>(counts[k]) * ipow(x[k], p);
  }
  if (m % 2 == 1) s += static_cast<double>(counts[m / 2]) * ipow(x[m / 2], p);
  return s / total;
}

inline std::string power_label(std::size_t coord, unsigned p) {
  return "Y" + std::to_string(coord) + (p == 1 ? "" : "^" + std::to_string(p));
}

}  // namespace detail

inline constexpr std::uint64_t kMaxExhaustiveSeeds = 10'000'000;

/// True when all q^K seeds fit under kMaxExhaustiveSeeds.
inline bool exhaustive_feasible(const DesignSampler& sampler) {
  long double space = 1.0L;
  for (std::size_t t = 0; t < sampler.independence(); ++t) space *= static_cast<long double>(sampler.q());
  return space <= static_cast<long double>(kMaxExhaustiveSeeds);
}

/// Compares per-coordinate moments up to `max_order`, and the cross moments
/// E[Y0 Y1], E[Y0^2 Y1^2] when n >= 2 and K >= 2, against N(0, I) targets.
///
/// Exhaustive mode enumerates all q^K seeds with integer tallies, so the
/// result is exact and independent of `jobs`; the allowed error is the
/// statistical-distance slack 2 * tv * max|node|^p (doubled for pairs) plus
/// the quadrature's own error above its exact order. Monte-Carlo mode draws
/// `mc_samples` uniform seeds and adds 4 standard errors.
inline MomentReport verify_moments(const DesignSampler& sampler, unsigned max_order, MomentMode mode,
                                   std::uint64_t mc_samples = 1'000'000, std::uint64_t key = 0,
                                   unsigned jobs = 1) {
  const std::size_t n = sampler.dimension();
  const std::size_t m = sampler.atoms();
  const std::size_t kk = sampler.independence();
  const std::uint64_t q = sampler.q();
  const bool pairs = n >= 2 && kk >= 2;
  const Quadrature1D& quad = sampler.quadrature();
  const double xmax = quad.max_abs_node();

  MomentReport report;
  report.mode = mode;
  report.tv_bound = sampler.tv_bound();
  report.exact_tv = sampler.exact_tv();
  const double tv = report.exact_tv;

  auto quad_error = [&](unsigned p) {
    return p <= quad.order() ? 0.0 : std::abs(quad.moment(p) - gaussian_moment(p));
  };

  if (mode == MomentMode::exhaustive) {
    if (!exhaustive_feasible(sampler)) throw ParameterError("exhaustive moment check needs q^K <= 1e7");
    std::uint64_t total = 1;
    for (std::size_t t = 0; t < kk; ++t) total *= q;
    constexpr std::size_t kUnit = 1 << 16;
    struct Tally {
      std::vector<std::uint64_t> marginal;  // n x M
      std::vector<std::uint64_t> joint;     // M x M for coordinates (0, 1)
    };
    auto tallies = run_units(unit_count(total, kUnit), jobs, [&](std::size_t u) {
      const UnitRange r = unit_range(u, total, kUnit);
      Tally t{std::vector<std::uint64_t>(n * m, 0), std::vector<std::uint64_t>(pairs ? m * m : 0, 0)};
      std::vector<std::uint64_t> seed(kk);
      std::uint64_t idx = r.begin;
      for (std::size_t d = 0; d < kk; ++d) {
        seed[d] = idx % q;
        idx /= q;
      }
      std::vector<std::size_t> atom(n);
      for (std::size_t s = r.begin; s < r.end; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
          atom[i] = sampler.atom_index(sampler.family().eval_unchecked(seed, i));
          ++t.marginal[i * m + atom[i]];
        }
        if (pairs) ++t.joint[atom[0] * m + atom[1]];
        for (std::size_t d = 0; d < kk; ++d) {
          if (++seed[d] < q) break;
          seed[d] = 0;
        }
      }
      return t;
    });
    Tally sum{std::vector<std::uint64_t>(n * m, 0), std::vector<std::uint64_t>(pairs ? m * m : 0, 0)};
    for (const auto& t : tallies) {
      for (std::size_t i = 0; i < sum.marginal.size(); ++i) sum.marginal[i] += t.marginal[i];
      for (std::size_t i = 0; i < sum.joint.size(); ++i) sum.joint[i] += t.joint[i];
    }
    report.seeds_examined = total;
    const double dtotal = static_cast<double>(total);
    for (std::size_t i = 0; i < n; ++i) {
      std::span<const std::uint64_t> counts(sum.marginal.data() + i * m, m);
      for (unsigned p = 1; p <= max_order; ++p) {
        MomentCheck c;
        c.label = "E[" + detail::power_label(i, p) + "]";
        c.order = p;
        c.value = detail::atom_moment(quad, counts, p, dtotal);
        c.target = gaussian_moment(p);
        c.within_design_order = p <= quad.order();
        c.bound = 2.0 * tv * detail::ipow(xmax, p) + quad_error(p);
        c.pass = detail::within(c.value, c.target, c.bound);
        report.checks.push_back(c);
      }
    }
    if (pairs) {
      for (unsigned p : {1u, 2u}) {
        if (2 * p > std::max(max_order, 2u)) continue;
        double s = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
          for (std::size_t b = 0; b < m; ++b) {
            s += static_cast<double>(sum.joint[a * m + b]) * detail::ipow(quad.nodes()[a], p) *
                 detail::ipow(quad.nodes()[b], p);
          }
        }
        MomentCheck c;
        c.label = "E[" + detail::power_label(0, p) + " " + detail::power_label(1, p) + "]";
        c.order = 2 * p;
        c.value = s / dtotal;
        c.target = gaussian_moment(p) * gaussian_moment(p);
        c.within_design_order = p <= quad.order();
        c.bound = 2.0 * (2.0 * tv) * detail::ipow(xmax, 2 * p) + 2.0 * quad_error(p) * gaussian_moment(p);
        c.pass = detail::within(c.value, c.target, c.bound);
        report.checks.push_back(c);
      }
    }
    return report;
  }

  // Monte Carlo over uniformly drawn seeds.
  if (mc_samples < 2) throw ParameterError("monte carlo moment check needs at least 2 samples");
  const std::size_t pair_terms = pairs ? 2 : 0;
  const std::size_t stats = n * max_order + pair_terms;
  constexpr std::size_t kUnit = 1 << 14;
  struct Sums {
    std::vector<double> s1, s2;
  };
  auto sums = run_units(unit_count(mc_samples, kUnit), jobs, [&](std::size_t u) {
    const UnitRange r = unit_range(u, mc_samples, kUnit);
    CounterRng rng(key, u);
    Sums acc{std::vector<double>(stats, 0.0), std::vector<double>(stats, 0.0)};
    std::vector<std::uint64_t> seed(kk);
    std::vector<double> y(n);
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % q);
    for (std::size_t s = r.begin; s < r.end; ++s) {
      for (auto& e : seed) {
        std::uint64_t v;
        do v = rng.next_u64();
        while (v >= limit);
        e = v % q;
      }
      design_sample_into(sampler, seed, y);
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double pw = 1.0;
        for (unsigned p = 1; p <= max_order; ++p, ++k) {
          pw *= y[i];
          acc.s1[k] += pw;
          acc.s2[k] += pw * pw;
        }
      }
      if (pairs) {
        const double v1 = y[0] * y[1];
        const double v2 = v1 * v1;
        acc.s1[k] += v1;
        acc.s2[k] += v1 * v1;
        acc.s1[k + 1] += v2;
        acc.s2[k + 1] += v2 * v2;
      }
    }
    return acc;
  });
  std::vector<double> s1(stats, 0.0), s2(stats, 0.0);
  for (const auto& part : sums) {
    for (std::size_t k = 0; k < stats; ++k) {
      s1[k] += part.s1[k];
      s2[k] += part.s2[k];
    }
  }
  report.seeds_examined = mc_samples;
  const double count = static_cast<double>(mc_samples);
  auto finish = [&](MomentCheck c, std::size_t k, double tv_scale) {
    c.value = s1[k] / count;
    const double var = std::max(0.0, s2[k] / count - c.value * c.value) * count / (count - 1.0);
    c.stderr_ = std::sqrt(var / count);
    c.bound = 4.0 * c.stderr_ + 2.0 * tv_scale * tv * detail::ipow(xmax, c.order) + quad_error(c.order);
    c.pass = detail::within(c.value, c.target, c.bound);
    report.checks.push_back(c);
  };
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (unsigned p = 1; p <= max_order; ++p, ++k) {
      MomentCheck c;
      c.label = "E[" + detail::power_label(i, p) + "]";
      c.order = p;
      c.target = gaussian_moment(p);
      c.within_design_order = p <= quad.order();
      finish(c, k, 1.0);
    }
  }
  if (pairs) {
    MomentCheck c1;
    c1.label = "E[Y0 Y1]";
    c1.order = 2;
    c1.target = 0.0;
    finish(c1, k, 2.0);
    MomentCheck c2;
    c2.label = "E[Y0^2 Y1^2]";
    c2.order = 4;
    c2.target = 1.0;
    c2.within_design_order = 2 <= quad.order();
    finish(c2, k + 1, 2.0);
  }
  return report;
}

}  // namespace ptfprg
