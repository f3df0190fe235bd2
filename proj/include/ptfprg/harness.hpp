#pragma once

/*
 * Monte-Carlo experiment engine.
 *
 * All estimators split their sample range into fixed-size units. Unit u
 * draws from a random stream addressed by (key, u) and returns integer
 * tallies or partial sums, which are combined in unit order. Results are
 * therefore identical for every thread count.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ptfprg/bitstream.hpp"
#include "ptfprg/error.hpp"
#include "ptfprg/generator.hpp"
#include "ptfprg/hermite.hpp"
#include "ptfprg/least_squares.hpp"
#include "ptfprg/parallel.hpp"
#include "ptfprg/polynomial.hpp"
#include "ptfprg/ptf.hpp"
#include "ptfprg/random.hpp"

namespace ptfprg {

inline constexpr std::size_t kSamplesPerUnit = 4096;

// ---------------------------------------------------------------------------
// Sample sources. A source exposes dimension(), an id(), and make_drawer(),
// which returns a callable draw(index, out) owning its own scratch space.

/// Conventional N(0, I) sampler standing in for the ideal Gaussian.
class GaussianSource {
 public:
  GaussianSource(std::size_t n, std::uint64_t key) : n_(n), key_(key) {}
  std::size_t dimension() const noexcept { return n_; }
  std::string id() const { return "gaussian"; }

  auto make_drawer() const {
    return [this](std::uint64_t index, std::span<double> out) {
      CounterRng rng(key_, index);
      for (double& v : out) v = rng.normal();
    };
  }

 private:
  std::size_t n_;
  std::uint64_t key_;
};

/// The full generator; sample `index` uses the master bitstream expanded
/// from (key, index).
class GeneratorSource {
 public:
  GeneratorSource(const GeneratorConfig& config, std::uint64_t key) : config_(&config), key_(key) {}
  std::size_t dimension() const noexcept { return config_->n; }
  std::string id() const {
    return "generator(eps=" + std::to_string(config_->epsilon) + ",ell=" + std::to_string(config_->ell) + ")";
  }

  auto make_drawer() const {
    struct Drawer {
      const GeneratorConfig* config;
      std::uint64_t key;
      std::vector<std::uint64_t> seed;
      std::vector<double> design;
      void operator()(std::uint64_t index, std::span<double> out) {
        const BitStream master = expand_seed(key, index, total_seed_bits(*config));
        sample_into(*config, master, out, seed, design);
      }
    };
    return Drawer{config_, key_, {}, {}};
  }

 private:
  const GeneratorConfig* config_;
  std::uint64_t key_;
};

/// Iterated hybrid with a residual Gaussian term.
class HybridSource {
 public:
  HybridSource(double epsilon, std::size_t ell, const DesignSampler& sampler, std::uint64_t key)
      : epsilon_(epsilon), ell_(ell), sampler_(&sampler), key_(key) {}
  std::size_t dimension() const noexcept { return sampler_->dimension(); }
  std::string id() const {
    return "hybrid(eps=" + std::to_string(epsilon_) + ",ell=" + std::to_string(ell_) + ")";
  }

  auto make_drawer() const {
    return [this, gauss = std::vector<double>(sampler_->dimension())](std::uint64_t index,
                                                                       std::span<double> out) mutable {
      const BitStream master = expand_seed(key_, index, ell_ * sampler_->stream_bits());
      CounterRng rng(derive_key(key_, 0x6761757373ULL), index);
      for (double& v : gauss) v = rng.normal();
      const auto y = prop9_hybrid_sample(epsilon_, ell_, *sampler_, master, gauss);
      std::copy(y.begin(), y.end(), out.begin());
    };
  }

 private:
  double epsilon_;
  std::size_t ell_;
  const DesignSampler* sampler_;
  std::uint64_t key_;
};

// ---------------------------------------------------------------------------
// Fooling gap

struct GapEstimate {
  std::string ptf_id;
  std::string generator_id;
  std::uint64_t n_samples_gen = 0;
  std::uint64_t n_samples_baseline = 0;  // 0 for the analytic baseline
  double e_gen = 0.0;
  double e_baseline = 0.0;
  double gap = 0.0;
  double stderr_ = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

namespace detail {

inline GapEstimate finish_gap(double e_gen, std::uint64_t n_gen, double e_base, std::uint64_t n_base) {
  GapEstimate g;
  g.n_samples_gen = n_gen;
  g.n_samples_baseline = n_base;
  g.e_gen = e_gen;
  g.e_baseline = e_base;
  g.gap = e_gen - e_base;
  // Sign outcomes are +-1 with mean m, so each has variance 1 - m^2.
  double var = (1.0 - e_gen * e_gen) / static_cast<double>(n_gen);
  if (n_base > 0) var += (1.0 - e_base * e_base) / static_cast<double>(n_base);
  g.stderr_ = std::sqrt(std::max(0.0, var));
  g.ci_low = g.gap - 1.96 * g.stderr_;
  g.ci_high = g.gap + 1.96 * g.stderr_;
  return g;
}

/// Mean of each PTF over `count` samples of `source`.
template <typename Source>
std::vector<double> ptf_means(std::span<const PTF> ptfs, const Source& source, std::uint64_t count, unsigned jobs) {
  if (count == 0) throw ParameterError("sample count must be positive");
  for (const auto& f : ptfs) {
    if (f.num_vars() != source.dimension()) throw DimensionError("PTF dimension does not match source");
  }
  std::vector<FlatPolynomial> flat;
  flat.reserve(ptfs.size());
  for (const auto& f : ptfs) flat.emplace_back(f.poly());
  std::size_t scratch_size = 0;
  for (const auto& f : flat) scratch_size = std::max(scratch_size, f.scratch_size());

  auto tallies = run_units(unit_count(count, kSamplesPerUnit), jobs, [&](std::size_t u) {
    const UnitRange r = unit_range(u, count, kSamplesPerUnit);
    auto draw = source.make_drawer();
    std::vector<double> x(source.dimension()), scratch(scratch_size);
    std::vector<std::uint64_t> positive(ptfs.size(), 0);
    for (std::size_t s = r.begin; s < r.end; ++s) {
      draw(s, x);
      for (std::size_t j = 0; j < flat.size(); ++j) {
        if (flat[j].evaluate(x, scratch) >= 0.0) ++positive[j];
      }
    }
    return positive;
  });
  std::vector<double> means(ptfs.size());
  for (std::size_t j = 0; j < ptfs.size(); ++j) {
    std::uint64_t pos = 0;
    for (const auto& t : tallies) pos += t[j];
    means[j] = (2.0 * static_cast<double>(pos) - static_cast<double>(count)) / static_cast<double>(count);
  }
  return means;
}

}  // namespace detail

struct Baseline {
  enum class Kind { analytic, monte_carlo };
  Kind kind = Kind::analytic;
  std::uint64_t samples = 0;
  std::uint64_t key = 0;

  static Baseline analytic() { return {}; }
  static Baseline monte_carlo(std::uint64_t samples, std::uint64_t key) {
    return {Kind::monte_carlo, samples, key};
  }
};

/// Gap E[f(Y)] - E[f(X)] for each PTF, sharing one stream of generator samples.
template <typename Source>
std::vector<GapEstimate> estimate_gaps(std::span<const PTF> ptfs, const Source& generator, std::uint64_t n_gen,
                                       const Baseline& baseline, unsigned jobs = 1) {
  std::vector<double> e_base(ptfs.size());
  std::uint64_t n_base = 0;
  if (baseline.kind == Baseline::Kind::analytic) {
    for (std::size_t j = 0; j < ptfs.size(); ++j) {
      const auto h = as_halfspace(ptfs[j]);
      if (!h) throw ParameterError("analytic baseline is only available for degree-1 PTFs");
      e_base[j] = halfspace_expectation(h->w, h->theta);
    }
  } else {
    n_base = baseline.samples;
    e_base = detail::ptf_means(ptfs, GaussianSource(generator.dimension(), baseline.key), n_base, jobs);
  }
  const auto e_gen = detail::ptf_means(ptfs, generator, n_gen, jobs);
  std::vector<GapEstimate> out;
  out.reserve(ptfs.size());
  for (std::size_t j = 0; j < ptfs.size(); ++j) {
    GapEstimate g = detail::finish_gap(e_gen[j], n_gen, e_base[j], n_base);
    g.ptf_id = std::to_string(j);
    g.generator_id = generator.id();
    out.push_back(std::move(g));
  }
  return out;
}

template <typename Source>
GapEstimate estimate_gap(const PTF& f, const Source& generator, std::uint64_t n_gen, const Baseline& baseline,
                         unsigned jobs = 1) {
  return estimate_gaps(std::span<const PTF>(&f, 1), generator, n_gen, baseline, jobs).front();
}

/// Gap between two arbitrary sources; identical sources give a zero gap.
template <typename SourceA, typename SourceB>
GapEstimate estimate_gap_between(const PTF& f, const SourceA& a, std::uint64_t n_a, const SourceB& b,
                                 std::uint64_t n_b, unsigned jobs = 1) {
  const PTF one[] = {f};
  const double ea = detail::ptf_means(std::span<const PTF>(one), a, n_a, jobs)[0];
  const double eb = detail::ptf_means(std::span<const PTF>(one), b, n_b, jobs)[0];
  GapEstimate g = detail::finish_gap(ea, n_a, eb, n_b);
  g.ptf_id = "0";
  g.generator_id = a.id();
  return g;
}

// ---------------------------------------------------------------------------
// Random instances

/// Sparse polynomial with `terms` distinct random monomials of total degree
/// at most d (one of exact degree d) and N(0,1) coefficients.
inline SparsePolynomial random_sparse_polynomial(std::size_t n, unsigned d, std::size_t terms, std::uint64_t seed) {
  const auto all = multi_indices_up_to(n, d);
  std::vector<std::size_t> top;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (total_degree(all[i]) == d) top.push_back(i);
  }
  terms = std::clamp<std::size_t>(terms, 1, all.size());
  CounterRng rng(seed, 0x73706172ULL);
  std::vector<std::size_t> chosen{top[rng.next_u64() % top.size()]};
  while (chosen.size() < terms) {
    const std::size_t c = rng.next_u64() % all.size();
    if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) chosen.push_back(c);
  }
  std::vector<std::pair<Exponents, double>> t;
  for (std::size_t c : chosen) {
    double coef = rng.normal();
    if (coef == 0.0) coef = 1.0;
    t.emplace_back(all[c], coef);
  }
  return SparsePolynomial(n, t);
}

/// Unit-norm random polynomials: the random_ptf ensemble.
inline std::vector<SparsePolynomial> unit_norm_ensemble(std::size_t n, unsigned d, std::size_t count,
                                                        std::uint64_t seed) {
  std::vector<SparsePolynomial> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(random_ptf({n, d, derive_key(seed, i)}).poly());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Anticoncentration and tail checks

namespace detail {

/// For each polynomial, counts samples of N(0, I) whose |p(X)| satisfies
/// each of `predicates` (applied to |p(X)|).
template <typename Predicate>
std::vector<std::vector<std::uint64_t>> count_abs_events(std::span<const SparsePolynomial> polys,
                                                        std::span<const double> levels, Predicate pred,
                                                        std::uint64_t n_samples, std::uint64_t key,
                                                        unsigned jobs) {
  std::vector<std::vector<std::uint64_t>> counts;
  for (std::size_t pi = 0; pi < polys.size(); ++pi) {
    const FlatPolynomial flat(polys[pi]);
    const std::uint64_t poly_key = derive_key(key, pi);
    auto tallies = run_units(unit_count(n_samples, kSamplesPerUnit), jobs, [&](std::size_t u) {
      const UnitRange r = unit_range(u, n_samples, kSamplesPerUnit);
      CounterRng rng(poly_key, u);
      std::vector<double> x(flat.num_vars()), scratch(flat.scratch_size());
      std::vector<std::uint64_t> c(levels.size(), 0);
      for (std::size_t s = r.begin; s < r.end; ++s) {
        for (double& v : x) v = rng.normal();
        const double a = std::abs(flat.evaluate(x, scratch));
        for (std::size_t l = 0; l < levels.size(); ++l) {
          if (pred(a, levels[l])) ++c[l];
        }
      }
      return c;
    });
    std::vector<std::uint64_t> total(levels.size(), 0);
    for (const auto& t : tallies) {
      for (std::size_t l = 0; l < levels.size(); ++l) total[l] += t[l];
    }
    counts.push_back(std::move(total));
  }
  return counts;
}

}  // namespace detail

struct ProbabilityRow {
  std::size_t poly_id = 0;
  unsigned degree = 0;
  double level = 0.0;        // eps for anticoncentration, N for tails
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double probability = 0.0;
  double reference = 0.0;    // bound shape without the constant
  double bound = 0.0;        // C * reference
  bool pass = false;
};

struct ProbabilityReport {
  double constant = 0.0;
  std::vector<ProbabilityRow> rows;
  bool monotone = true;  // tails only: non-increasing in N for each polynomial

  bool all_pass() const {
    return monotone && std::all_of(rows.begin(), rows.end(), [](const ProbabilityRow& r) { return r.pass; });
  }
};

/// Empirical Pr(|p(X)| <= eps |p|_2) against C * d * eps^{1/d}.
inline ProbabilityReport check_carbery_wright(std::span<const SparsePolynomial> polys, std::span<const double> eps_list,
                                              std::uint64_t n_samples, double constant, std::uint64_t key,
                                              unsigned jobs = 1) {
  std::vector<double> norms;
  for (const auto& p : polys) norms.push_back(l2_norm(p));
  std::vector<SparsePolynomial> unit;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (!(norms[i] > 0.0)) throw ParameterError("anticoncentration check needs nonzero polynomials");
    unit.push_back(polys[i].scaled(1.0 / norms[i]));
  }
  const auto counts = detail::count_abs_events(
      unit, eps_list, [](double a, double eps) { return a <= eps; }, n_samples, key, jobs);
  ProbabilityReport report;
  report.constant = constant;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const unsigned d = std::max(1u, unit[i].degree());
    for (std::size_t l = 0; l < eps_list.size(); ++l) {
      ProbabilityRow row;
      row.poly_id = i;
      row.degree = d;
      row.level = eps_list[l];
      row.samples = n_samples;
      row.hits = counts[i][l];
      row.probability = static_cast<double>(row.hits) / static_cast<double>(n_samples);
      row.reference = d * std::pow(eps_list[l], 1.0 / d);
      row.bound = constant * row.reference;
      row.pass = row.probability <= row.bound;
      report.rows.push_back(row);
    }
  }
  return report;
}

/// Empirical Pr(|p(X)| > N |p|_2) against C * 2^{-(N/2)^{2/d}}.
inline ProbabilityReport check_tail_bound(std::span<const SparsePolynomial> polys, std::span<const double> n_list,
                                          std::uint64_t n_samples, double constant, std::uint64_t key,
                                          unsigned jobs = 1) {
  std::vector<SparsePolynomial> unit;
  for (const auto& p : polys) {
    const double norm = l2_norm(p);
    if (!(norm > 0.0)) throw ParameterError("tail check needs nonzero polynomials");
    unit.push_back(p.scaled(1.0 / norm));
  }
  const auto counts = detail::count_abs_events(
      unit, n_list, [](double a, double level) { return a > level; }, n_samples, key, jobs);
  ProbabilityReport report;
  report.constant = constant;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const unsigned d = std::max(1u, unit[i].degree());
    std::vector<std::pair<double, double>> by_level;
    for (std::size_t l = 0; l < n_list.size(); ++l) {
      ProbabilityRow row;
      row.poly_id = i;
      row.degree = d;
      row.level = n_list[l];
      row.samples = n_samples;
      row.hits = counts[i][l];
      row.probability = static_cast<double>(row.hits) / static_cast<double>(n_samples);
      row.reference = std::pow(2.0, -std::pow(n_list[l] / 2.0, 2.0 / d));
      row.bound = constant * row.reference;
      row.pass = row.probability <= row.bound;
      by_level.emplace_back(row.level, row.probability);
      report.rows.push_back(row);
    }
    std::sort(by_level.begin(), by_level.end());
    for (std::size_t l = 1; l < by_level.size(); ++l) {
      if (by_level[l].second > by_level[l - 1].second) report.monotone = false;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Derivative-moment identity

struct DerivativeReport {
  unsigned ell = 0;
  std::uint64_t samples = 0;
  double rhs = 0.0;
  double lhs = 0.0;
  double stderr_ = 0.0;
  double relative_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Monte-Carlo estimate of E[(D_{Z_1} ... D_{Z_l} p(X))^2] with X, Z_1..Z_l
/// independent N(0, I), compared with the exact Hermite-side value.
inline DerivativeReport check_derivative_identity(const SparsePolynomial& p, unsigned ell, std::uint64_t n_samples,
                                                  std::uint64_t key, double tolerance = 0.05, unsigned jobs = 1) {
  if (n_samples < 2) throw ParameterError("derivative check needs at least 2 samples");
  const std::size_t n = p.num_vars();
  // All ordered index tuples (i_1..i_l) and the matching partial derivatives.
  std::vector<std::vector<std::size_t>> tuples{{}};
  for (unsigned t = 0; t < ell; ++t) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& tup : tuples) {
      for (std::size_t i = 0; i < n; ++i) {
        auto e = tup;
        e.push_back(i);
        next.push_back(std::move(e));
      }
    }
    tuples = std::move(next);
  }
  std::vector<FlatPolynomial> partials;
  std::vector<std::size_t> live;
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    SparsePolynomial d = p;
    for (std::size_t i : tuples[t]) d = d.partial(i);
    if (!d.is_zero()) {
      partials.emplace_back(d);
      live.push_back(t);
    }
  }
  std::size_t scratch_size = 1;
  for (const auto& f : partials) scratch_size = std::max(scratch_size, f.scratch_size());

  struct Sums {
    double s1 = 0.0, s2 = 0.0;
  };
  auto parts = run_units(unit_count(n_samples, kSamplesPerUnit), jobs, [&](std::size_t u) {
    const UnitRange r = unit_range(u, n_samples, kSamplesPerUnit);
    CounterRng rng(key, u);
    std::vector<double> x(n), z(n * ell), scratch(scratch_size);
    Sums acc;
    for (std::size_t s = r.begin; s < r.end; ++s) {
      for (double& v : x) v = rng.normal();
      for (double& v : z) v = rng.normal();
      double value = 0.0;
      for (std::size_t j = 0; j < partials.size(); ++j) {
        double dir = 1.0;
        const auto& tup = tuples[live[j]];
        for (unsigned t = 0; t < ell; ++t) dir *= z[t * n + tup[t]];
        value += dir * partials[j].evaluate(x, scratch);
      }
      const double sq = value * value;
      acc.s1 += sq;
      acc.s2 += sq * sq;
    }
    return acc;
  });
  Sums total;
  for (const auto& s : parts) {
    total.s1 += s.s1;
    total.s2 += s.s2;
  }
  DerivativeReport rep;
  rep.ell = ell;
  rep.samples = n_samples;
  rep.tolerance = tolerance;
  rep.rhs = derivative_moment_rhs(p, ell);
  const double count = static_cast<double>(n_samples);
  rep.lhs = total.s1 / count;
  const double var = std::max(0.0, total.s2 / count - rep.lhs * rep.lhs) * count / (count - 1.0);
  rep.stderr_ = std::sqrt(var / count);
  if (rep.rhs == 0.0) {
    rep.relative_error = rep.lhs == 0.0 ? 0.0 : std::abs(rep.lhs);
    rep.pass = std::abs(rep.lhs) <= 1e-12;
  } else {
    rep.relative_error = std::abs(rep.lhs - rep.rhs) / rep.rhs;
    rep.pass = rep.relative_error <= tolerance;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// One-dimensional smooth-expectation scaling

/// E[sgn((1 + a) X + b)] for X ~ N(0,1).
inline double linear_sign_expectation(double a, double b) { return 1.0 - 2.0 * normal_cdf(-b / (1.0 + a)); }

struct ShellResidual {
  double radius = 0.0;
  double max_residual = 0.0;
};

struct ScalingReport {
  unsigned k = 0;
  std::vector<double> fit_coefficients;  // over a^i b^j, i + j < k, graded order
  std::vector<std::pair<unsigned, unsigned>> fit_powers;
  double center_value = 0.0;
  double slope_b = 0.0;  // fitted coefficient of b
  std::vector<ShellResidual> shells;
  double loglog_slope = 0.0;
  double required_slope = 0.0;
  bool pass = false;
};

/// Square grid of side `points` on [-radius, radius]^2.
inline std::vector<std::pair<double, double>> square_grid(double radius, std::size_t points) {
  std::vector<std::pair<double, double>> g;
  for (std::size_t i = 0; i < points; ++i) {
    const double a = points == 1 ? 0.0 : -radius + 2.0 * radius * i / (points - 1);
    for (std::size_t j = 0; j < points; ++j) {
      const double b = points == 1 ? 0.0 : -radius + 2.0 * radius * j / (points - 1);
      g.emplace_back(a, b);
    }
  }
  return g;
}

/// Fits a total-degree-(k-1) polynomial R(a, b) to the exact expectation on
/// `fit_grid`, then measures max |E - R| on square shells max(|a|,|b|) = r
/// (with `shell_points` points per side) and the log-log slope of the
/// residual against r. A smooth expectation gives slope about k.
inline ScalingReport check_prop4_1d(unsigned k, std::span<const std::pair<double, double>> fit_grid,
                                  std::span<const double> shell_radii, std::size_t shell_points = 41) {
  if (k < 1) throw ParameterError("k must be positive");
  for (const auto& [a, b] : fit_grid) {
    if (!(std::abs(a) < 0.5)) throw ParameterError("fit grid needs |a| < 1/2");
  }
  for (double r : shell_radii) {
    if (!(r > 0.0 && r < 0.5)) throw ParameterError("shell radii must lie in (0, 1/2)");
  }
  if (shell_points < 2) throw ParameterError("need at least two points per shell side");
  ScalingReport rep;
  rep.k = k;
  rep.required_slope = k - 0.5;
  for (unsigned total = 0; total < k; ++total) {
    for (unsigned i = total + 1; i-- > 0;) rep.fit_powers.emplace_back(i, total - i);
  }
  const std::size_t cols = rep.fit_powers.size();
  auto features = [&](double a, double b, double* row) {
    for (std::size_t c = 0; c < cols; ++c) {
      row[c] = std::pow(a, rep.fit_powers[c].first) * std::pow(b, rep.fit_powers[c].second);
    }
  };
  std::vector<double> design(fit_grid.size() * cols), target(fit_grid.size());
  for (std::size_t r = 0; r < fit_grid.size(); ++r) {
    features(fit_grid[r].first, fit_grid[r].second, design.data() + r * cols);
    target[r] = linear_sign_expectation(fit_grid[r].first, fit_grid[r].second);
  }
  rep.fit_coefficients = least_squares(std::move(design), fit_grid.size(), cols, std::move(target));
  for (std::size_t c = 0; c < cols; ++c) {
    if (rep.fit_powers[c] == std::pair<unsigned, unsigned>{0, 1}) rep.slope_b = rep.fit_coefficients[c];
  }
  rep.center_value = linear_sign_expectation(0.0, 0.0);

  std::vector<double> row(cols);
  auto residual = [&](double a, double b) {
    features(a, b, row.data());
    double fit = 0.0;
    for (std::size_t c = 0; c < cols; ++c) fit += rep.fit_coefficients[c] * row[c];
    return std::abs(linear_sign_expectation(a, b) - fit);
  };
  for (double r : shell_radii) {
    double worst = 0.0;
    for (std::size_t i = 0; i < shell_points; ++i) {
      const double t = -r + 2.0 * r * i / (shell_points - 1);
      worst = std::max({worst, residual(t, r), residual(t, -r), residual(r, t), residual(-r, t)});
    }
    rep.shells.push_back({r, worst});
  }
  if (rep.shells.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (const auto& s : rep.shells) {
      mx += std::log(s.radius);
      my += std::log(s.max_residual);
    }
    mx /= rep.shells.size();
    my /= rep.shells.size();
    double sxy = 0.0, sxx = 0.0;
    for (const auto& s : rep.shells) {
      const double dx = std::log(s.radius) - mx;
      sxy += dx * (std::log(s.max_residual) - my);
      sxx += dx * dx;
    }
    rep.loglog_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  rep.pass = rep.shells.size() >= 2 && rep.loglog_slope >= rep.required_slope && std::abs(rep.center_value) <= 1e-12;
  return rep;
}

}  // namespace ptfprg
