#pragma once

/*
 * Experiment runs described by a JSON document, persisted as CSV + JSONL.
 *
 * An ExperimentSpec is a JSON document:
 *
 *   { "experiment": "fool" | "cw" | "tail" | "deriv" | "prop4" | "moments",
 *     "seed": "<hex key>", "samples": int, ...experiment parameters... }
 *
 * Each run produces a CSV table (fixed columns per experiment, floats with
 * 12 significant digits) and a JSONL log whose first line echoes the
 * resolved document and whose remaining lines mirror the CSV rows. Thread count
 * is not part of the document and never affects the output.
 */

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ptfprg/bitstream.hpp"
#include "ptfprg/design.hpp"
#include "ptfprg/error.hpp"
#include "ptfprg/generator.hpp"
#include "ptfprg/harness.hpp"
#include "ptfprg/io.hpp"
#include "ptfprg/ptf.hpp"

namespace ptfprg {

struct ExperimentSpec {
  std::string kind;
  json params = json::object();  // full document, defaults filled in by the runner
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out;  // CSV path; the JSONL log goes to out + ".jsonl". Empty: no files.

  static ExperimentSpec from_json(const json& j) {
    ExperimentSpec s;
    if (!j.is_object()) throw ParameterError("experiment spec must be a JSON object");
    s.kind = j.value("experiment", std::string{});
    if (s.kind.empty()) throw ParameterError("experiment spec needs an \"experiment\" field");
    s.params = j;
    if (j.contains("seed")) s.seed = parse_hex_key(j.at("seed").get<std::string>());
    return s;
  }
};

struct ExperimentResult {
  std::string csv;
  std::string jsonl;
  bool all_pass = true;
};

namespace detail {

inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(const json& row) { rows_.push_back(row); }

  std::string csv() const {
    std::ostringstream os;
    for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        const json& v = row.at(columns_[c]);
        os << (c ? "," : "");
        if (v.is_number_float()) {
          os << fmt12(v.get<double>());
        } else if (v.is_boolean()) {
          os << (v.get<bool>() ? "true" : "false");
        } else if (v.is_string()) {
          os << v.get<std::string>();
        } else {
          os << v.dump();
        }
      }
      os << '\n';
    }
    return os.str();
  }

  std::string jsonl(const json& spec_echo) const {
    std::string out = json{{"spec", spec_echo}}.dump() + "\n";
    for (const auto& row : rows_) out += row.dump() + "\n";
    return out;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<json> rows_;
};

template <typename T>
T param(json& p, const char* name, T fallback) {
  if (!p.contains(name)) p[name] = fallback;
  return p.at(name).get<T>();
}

inline std::string hex_key(std::uint64_t key) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(key));
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline ExperimentResult run_fool(json& p, std::uint64_t seed, unsigned jobs) {
  json& ens = p["ensemble"];
  if (ens.is_null()) ens = json::object();
  const auto n = detail::param<std::size_t>(ens, "n", 8);
  const auto d = detail::param<unsigned>(ens, "d", 1);
  const auto count = detail::param<std::size_t>(ens, "count", 20);
  const auto rng_seed = detail::param<std::uint64_t>(ens, "rng_seed", 1);
  json& gen = p["generator"];
  if (gen.is_null()) gen = json::object();
  const auto gen_kind = detail::param<std::string>(gen, "kind", "blend");
  const auto epsilons = detail::param<std::vector<double>>(gen, "epsilons", {0.5, 0.3, 0.2});
  const auto samples = detail::param<std::uint64_t>(p, "samples", 100000);
  const auto slack = detail::param<double>(p, "gap_slack", 0.02);
  const auto multiplier = detail::param<double>(p, "stderr_multiplier", 3.0);
  json& base = p["baseline"];
  if (base.is_null()) base = json::object();
  const auto base_kind = detail::param<std::string>(base, "kind", d == 1 ? "analytic" : "monte_carlo");
  const auto base_samples = detail::param<std::uint64_t>(base, "samples", base_kind == "analytic" ? 0 : 10 * samples);

  std::vector<PTF> ptfs;
  for (std::size_t i = 0; i < count; ++i) ptfs.push_back(random_ptf({n, d, derive_key(rng_seed, i)}));
  const Baseline baseline = base_kind == "analytic" ? Baseline::analytic()
                           : base_kind == "monte_carlo"
                               ? Baseline::monte_carlo(base_samples, derive_key(seed, 0xba5e))
                               : throw ParameterError("baseline kind must be analytic or monte_carlo");

  detail::Table table({"ptf_id", "generator", "epsilon", "ell", "truncated", "n_samples_gen", "n_samples_baseline",
                       "e_gen", "e_baseline", "gap", "stderr", "ci95_low", "ci95_high", "pass"});
  ExperimentResult result;
  auto emit = [&](const std::vector<GapEstimate>& gaps, const std::string& gen_id, double eps, std::size_t ell,
                  bool truncated) {
    for (const auto& g : gaps) {
      const bool pass = std::abs(g.gap) <= multiplier * g.stderr_ + slack;
      result.all_pass = result.all_pass && pass;
      table.add({{"ptf_id", g.ptf_id}, {"generator", gen_id}, {"epsilon", eps}, {"ell", ell},
                 {"truncated", truncated}, {"n_samples_gen", g.n_samples_gen},
                 {"n_samples_baseline", g.n_samples_baseline}, {"e_gen", g.e_gen}, {"e_baseline", g.e_baseline},
                 {"gap", g.gap}, {"stderr", g.stderr_}, {"ci95_low", g.ci_low}, {"ci95_high", g.ci_high},
                 {"pass", pass}});
    }
  };

  if (!ptfs.empty()) {
    if (gen_kind == "blend") {
      const auto k = detail::param<unsigned>(gen, "k", 2);
      std::optional<std::size_t> cap;
      if (gen.contains("ell_cap") && !gen["ell_cap"].is_null()) cap = gen["ell_cap"].get<std::size_t>();
      for (std::size_t e = 0; e < epsilons.size(); ++e) {
        const GeneratorConfig cfg = plan(n, d, k, epsilons[e], cap);
        const GeneratorSource source(cfg, derive_key(seed, e + 1));
        emit(estimate_gaps(std::span<const PTF>(ptfs), source, samples, baseline, jobs), "blend", epsilons[e],
             cfg.ell, cfg.truncated());
      }
    } else if (gen_kind == "hybrid") {
      const auto order = detail::param<unsigned>(gen, "order", 10 * d * 2);
      const auto ell = detail::param<std::size_t>(gen, "ell", 1);
      const auto tv = detail::param<double>(gen, "tv_budget", 1e-4);
      const DesignSampler sampler = build_sampler(points_for_order(order), order, n, tv);
      for (std::size_t e = 0; e < epsilons.size(); ++e) {
        const HybridSource source(epsilons[e], ell, sampler, derive_key(seed, e + 1));
        emit(estimate_gaps(std::span<const PTF>(ptfs), source, samples, baseline, jobs), "hybrid", epsilons[e], ell,
             false);
      }
    } else if (gen_kind == "gaussian") {
      const GaussianSource source(n, derive_key(seed, 1));
      emit(estimate_gaps(std::span<const PTF>(ptfs), source, samples, baseline, jobs), "gaussian", 0.0, 0, false);
    } else {
      throw ParameterError("generator kind must be blend, hybrid or gaussian");
    }
  }
  result.csv = table.csv();
  result.jsonl = table.jsonl(p);
  return result;
}

inline std::vector<SparsePolynomial> probability_ensemble(json& p) {
  const auto n = detail::param<std::size_t>(p, "n", 3);
  const auto degrees = detail::param<std::vector<unsigned>>(p, "degrees", {2, 3});
  const auto per_degree = detail::param<std::size_t>(p, "polys_per_degree", 2);
  const auto rng_seed = detail::param<std::uint64_t>(p, "rng_seed", 1);
  std::vector<SparsePolynomial> polys;
  for (unsigned d : degrees) {
    auto batch = unit_norm_ensemble(n, d, per_degree, derive_key(rng_seed, d));
    polys.insert(polys.end(), batch.begin(), batch.end());
  }
  return polys;
}

inline ExperimentResult run_probability(json& p, std::uint64_t seed, unsigned jobs, bool tails) {
  const auto polys = probability_ensemble(p);
  const auto samples = detail::param<std::uint64_t>(p, "samples", 10'000'000);
  const auto levels = tails ? detail::param<std::vector<double>>(p, "levels", {2.0, 4.0, 6.0})
                            : detail::param<std::vector<double>>(p, "eps", {1e-2, 1e-3});
  const auto constant = detail::param<double>(p, "constant", tails ? 10.0 : 3.0);
  const ProbabilityReport rep = tails ? check_tail_bound(polys, levels, samples, constant, seed, jobs)
                                      : check_carbery_wright(polys, levels, samples, constant, seed, jobs);
  detail::Table table({"poly_id", "degree", tails ? "N" : "eps", "samples", "hits", "probability", "reference",
                       "bound", "ratio", "pass"});
  for (const auto& r : rep.rows) {
    table.add({{"poly_id", r.poly_id}, {"degree", r.degree}, {tails ? "N" : "eps", r.level}, {"samples", r.samples},
               {"hits", r.hits}, {"probability", r.probability}, {"reference", r.reference}, {"bound", r.bound},
               {"ratio", r.reference > 0 ? r.probability / r.reference : 0.0}, {"pass", r.pass}});
  }
  ExperimentResult result;
  result.all_pass = rep.all_pass();
  result.csv = table.csv();
  json echo = p;
  echo["monotone"] = rep.monotone;
  result.jsonl = table.jsonl(echo);
  return result;
}

inline ExperimentResult run_deriv(json& p, std::uint64_t seed, unsigned jobs) {
  const auto n = detail::param<std::size_t>(p, "n", 3);
  const auto degree = detail::param<unsigned>(p, "degree", 3);
  const auto count = detail::param<std::size_t>(p, "count", 10);
  const auto terms = detail::param<std::size_t>(p, "terms", 6);
  const auto ells = detail::param<std::vector<unsigned>>(p, "ells", {1, 2});
  const auto samples = detail::param<std::uint64_t>(p, "samples", 1'000'000);
  const auto tolerance = detail::param<double>(p, "tolerance", 0.05);
  const auto rng_seed = detail::param<std::uint64_t>(p, "rng_seed", 1);
  detail::Table table({"poly_id", "ell", "samples", "lhs", "rhs", "stderr", "relative_error", "pass"});
  ExperimentResult result;
  for (std::size_t i = 0; i < count; ++i) {
    const SparsePolynomial poly = random_sparse_polynomial(n, degree, terms, derive_key(rng_seed, i));
    for (unsigned ell : ells) {
      const auto rep =
          check_derivative_identity(poly, ell, samples, derive_key(seed, i * 64 + ell), tolerance, jobs);
      result.all_pass = result.all_pass && rep.pass;
      table.add({{"poly_id", i}, {"ell", ell}, {"samples", samples}, {"lhs", rep.lhs}, {"rhs", rep.rhs},
                 {"stderr", rep.stderr_}, {"relative_error", rep.relative_error}, {"pass", rep.pass}});
    }
  }
  result.csv = table.csv();
  result.jsonl = table.jsonl(p);
  return result;
}

inline ExperimentResult run_scaling(json& p) {
  const auto k = detail::param<unsigned>(p, "k", 3);
  const auto fit_radius = detail::param<double>(p, "fit_radius", 0.01);
  const auto fit_points = detail::param<std::size_t>(p, "fit_points", 9);
  const auto shells = detail::param<std::vector<double>>(p, "shells", {0.2, 0.1, 0.05});
  const auto shell_points = detail::param<std::size_t>(p, "shell_points", 41);
  const auto grid = square_grid(fit_radius, fit_points);
  const ScalingReport rep = check_prop4_1d(k, grid, shells, shell_points);
  detail::Table table({"radius", "max_residual", "loglog_slope", "required_slope", "center_value", "slope_b", "pass"});
  for (const auto& s : rep.shells) {
    table.add({{"radius", s.radius}, {"max_residual", s.max_residual}, {"loglog_slope", rep.loglog_slope},
               {"required_slope", rep.required_slope}, {"center_value", rep.center_value}, {"slope_b", rep.slope_b},
               {"pass", rep.pass}});
  }
  ExperimentResult result;
  result.all_pass = rep.pass;
  result.csv = table.csv();
  result.jsonl = table.jsonl(p);
  return result;
}

inline DesignSampler sampler_from_params(json& p) {
  const auto points = detail::param<unsigned>(p, "points", 3);
  const auto independence = detail::param<std::size_t>(p, "independence", 4);
  const auto n = detail::param<std::size_t>(p, "n", 2);
  if (p.contains("q")) {
    return DesignSampler(gauss_hermite(points), KWiseFamily::standard(p["q"].get<std::uint64_t>(), independence, n));
  }
  const auto tv = detail::param<double>(p, "tv_budget", 0.06);
  return build_sampler(points, independence, n, tv);
}

inline ExperimentResult run_moments(json& p, std::uint64_t seed, unsigned jobs) {
  const DesignSampler sampler = sampler_from_params(p);
  const auto max_order = detail::param<unsigned>(p, "max_order", 4);
  auto mode = detail::param<std::string>(p, "mode", "auto");
  const auto samples = detail::param<std::uint64_t>(p, "samples", 1'000'000);
  if (mode == "auto") mode = exhaustive_feasible(sampler) ? "exhaustive" : "monte_carlo";
  if (mode != "exhaustive" && mode != "monte_carlo") {
    throw ParameterError("mode must be auto, exhaustive or monte_carlo");
  }
  const MomentReport rep = verify_moments(
      sampler, max_order, mode == "exhaustive" ? MomentMode::exhaustive : MomentMode::monte_carlo, samples, seed, jobs);
  detail::Table table({"moment", "order", "value", "target", "bound", "stderr", "within_design_order", "pass"});
  for (const auto& c : rep.checks) {
    table.add({{"moment", c.label}, {"order", c.order}, {"value", c.value}, {"target", c.target}, {"bound", c.bound},
               {"stderr", c.stderr_}, {"within_design_order", c.within_design_order}, {"pass", c.pass}});
  }
  ExperimentResult result;
  result.all_pass = rep.all_pass();
  result.csv = table.csv();
  json echo = p;
  echo["sampler"] = to_json(sampler);
  echo["mode_used"] = mode;
  echo["seeds_examined"] = rep.seeds_examined;
  echo["exact_tv"] = rep.exact_tv;
  result.jsonl = table.jsonl(echo);
  return result;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path);
}

/// Runs the experiment named by `spec.kind` and persists its outputs.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  json p = spec.params;
  p["experiment"] = spec.kind;
  p["seed"] = detail::hex_key(spec.seed);
  p.erase("jobs");
  p.erase("out");
  ExperimentResult result;
  if (spec.kind == "fool") {
    result = run_fool(p, spec.seed, spec.jobs);
  } else if (spec.kind == "cw") {
    result = run_probability(p, spec.seed, spec.jobs, false);
  } else if (spec.kind == "tail") {
    result = run_probability(p, spec.seed, spec.jobs, true);
  } else if (spec.kind == "deriv") {
    result = run_deriv(p, spec.seed, spec.jobs);
  } else if (spec.kind == "prop4") {
    result = run_scaling(p);
  } else if (spec.kind == "moments") {
    result = run_moments(p, spec.seed, spec.jobs);
  } else {
    throw ParameterError("unknown experiment kind: " + spec.kind);
  }
  if (!spec.out.empty()) {
    write_file(spec.out, result.csv);
    write_file(spec.out + ".jsonl", result.jsonl);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Generator sample dumps

/// JSONL rows {"seed_index": i, "y": [...]} for i in [0, count), sample i
/// drawn from the master bitstream expanded from (key, i).
inline std::string sample_jsonl(const GeneratorConfig& config, std::uint64_t key, std::uint64_t count, unsigned jobs) {
  constexpr std::size_t kUnit = 256;
  const GeneratorSource source(config, key);
  auto parts = run_units(unit_count(count, kUnit), jobs, [&](std::size_t u) {
    const UnitRange r = unit_range(u, count, kUnit);
    auto draw = source.make_drawer();
    std::vector<double> y(config.n);
    std::string out;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      draw(i, y);
      out += json{{"seed_index", i}, {"y", y}}.dump() + "\n";
    }
    return out;
  });
  std::string all;
  for (const auto& s : parts) all += s;
  return all;
}

/// One sample from an explicit master bitstream.
inline std::string sample_jsonl_raw(const GeneratorConfig& config, const BitStream& master) {
  return json{{"seed_index", 0}, {"y", sample(config, master)}}.dump() + "\n";
}

}  // namespace ptfprg
