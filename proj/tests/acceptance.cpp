// Acceptance suite: one line per criterion, exit status 0 only if all pass.
//
//   acceptance            run everything
//   acceptance 4 5        run a subset
//
// Each criterion also has a wall-clock limit that counts toward its verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "ptfprg/experiment.hpp"

#ifndef PTFPRG_CLI
#error "PTFPRG_CLI must point at the command line binary"
#endif

using namespace ptfprg;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// -- 1 ----------------------------------------------------------------------

Verdict quadrature_exactness() {
  double worst = 0.0;
  for (unsigned m = 1; m <= 8; ++m) {
    const auto q = gauss_hermite(m);
    for (unsigned j = 0; j <= 2 * m - 1; ++j) worst = std::max(worst, std::abs(q.moment(j) - oracle::gaussian_moment(j)));
  }
  const auto q3 = gauss_hermite(3);
  const double r3 = std::sqrt(3.0);
  double rule3 = 0.0;
  const double nodes[] = {-r3, 0.0, r3}, weights[] = {1.0 / 6, 2.0 / 3, 1.0 / 6};
  for (int i = 0; i < 3; ++i) {
    rule3 = std::max(rule3, std::abs(q3.nodes()[i] - nodes[i]));
    rule3 = std::max(rule3, std::abs(q3.weights()[i] - weights[i]));
  }
  return {worst <= 1e-9 && rule3 <= 1e-9, "max moment error " + fmt("%.3g", worst) + ", M=3 rule error " + fmt("%.3g", rule3)};
}

// -- 2 ----------------------------------------------------------------------

Verdict kwise_uniformity() {
  const auto fam = KWiseFamily::standard(5, 2, 4);
  int pairs_ok = 0, pairs = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      std::map<std::pair<std::uint64_t, std::uint64_t>, int> counts;
      for (std::uint64_t a = 0; a < 5; ++a) {
        for (std::uint64_t b = 0; b < 5; ++b) {
          const std::uint64_t s[] = {a, b};
          ++counts[{kwise_eval(fam, s, i), kwise_eval(fam, s, j)}];
        }
      }
      bool uniform = counts.size() == 25;
      for (const auto& [v, c] : counts) uniform = uniform && c == 1;
      pairs_ok += uniform;
      ++pairs;
    }
  }
  return {pairs_ok == pairs, std::to_string(pairs_ok) + "/" + std::to_string(pairs) + " coordinate pairs uniform on F_5^2"};
}

// -- 3 ----------------------------------------------------------------------

Verdict design_moments() {
  // q = 53: 53^4 seeds fit the exhaustive budget. q = 211 does not and is
  // checked by Monte Carlo.
  const auto small = build_sampler(3, 4, 2, 0.06);
  const auto big = DesignSampler(gauss_hermite(3), KWiseFamily::standard(211, 4, 2));
  const auto ex = verify_moments(small, 4, MomentMode::exhaustive);
  const auto mc = verify_moments(big, 4, MomentMode::monte_carlo, 1'000'000, 0x3c, 1);
  const double xmax = small.quadrature().max_abs_node();
  bool ok = ex.mode == MomentMode::exhaustive && exhaustive_feasible(small) && !exhaustive_feasible(big);
  double worst_ratio = 0.0;
  for (const auto& c : ex.checks) {
    ok = ok && c.pass && c.bound <= 4 * std::pow(xmax, c.order) * small.tv_bound() + 1e-15;
    if (c.bound > 0) worst_ratio = std::max(worst_ratio, std::abs(c.value - c.target) / c.bound);
  }
  double worst_z = 0.0;
  for (const auto& c : mc.checks) {
    ok = ok && c.pass;
    if (c.stderr_ > 0) worst_z = std::max(worst_z, std::abs(c.value - c.target) / c.stderr_);
  }
  return {ok, "exhaustive q=" + std::to_string(small.q()) + " (" + std::to_string(ex.seeds_examined) +
                  " seeds) worst error/bound " + fmt("%.3f", worst_ratio) + "; Monte Carlo q=211 worst |z| " +
                  fmt("%.2f", worst_z)};
}

// -- 4, 5 -------------------------------------------------------------------

std::vector<PTF> halfspace_ensemble() {
  std::vector<PTF> out;
  for (std::uint64_t i = 0; i < 20; ++i) out.push_back(random_ptf({8, 1, derive_key(1, i)}));
  return out;
}

std::vector<GapEstimate> fooling_gaps(double eps) {
  const auto ptfs = halfspace_ensemble();
  const auto cfg = plan(8, 1, 2, eps, 200);
  const GeneratorSource src(cfg, derive_key(0xacce, static_cast<std::uint64_t>(eps * 1000)));
  return estimate_gaps(std::span<const PTF>(ptfs), src, 100000, Baseline::analytic(), 1);
}

Verdict degree1_fooling() {
  const auto gaps = fooling_gaps(0.25);
  int ok = 0;
  double worst = 0.0;
  for (const auto& g : gaps) {
    const double allowed = 3 * g.stderr_ + 0.02;
    ok += std::abs(g.gap) <= allowed;
    worst = std::max(worst, std::abs(g.gap) / allowed);
  }
  return {ok == 20, std::to_string(ok) + "/20 within 3 stderr + 0.02, worst |gap|/allowed " + fmt("%.3f", worst)};
}

Verdict fooling_trend() {
  auto summarize = [](const std::vector<GapEstimate>& gaps, double& mean_abs, double& var_mean) {
    mean_abs = 0.0;
    var_mean = 0.0;
    for (const auto& g : gaps) {
      mean_abs += std::abs(g.gap);
      var_mean += g.stderr_ * g.stderr_;
    }
    const double n = static_cast<double>(gaps.size());
    mean_abs /= n;
    var_mean /= n * n;
  };
  double m5, v5, m2, v2;
  summarize(fooling_gaps(0.5), m5, v5);
  summarize(fooling_gaps(0.2), m2, v2);
  const double width = 2 * 1.96 * std::sqrt(v5 + v2);
  return {m5 >= m2 - width, "mean|gap| eps=0.5: " + fmt("%.5f", m5) + ", eps=0.2: " + fmt("%.5f", m2) +
                                ", pooled CI width " + fmt("%.5f", width)};
}

// -- 6 ----------------------------------------------------------------------

Verdict derivative_identity() {
  int ok = 0, total = 0;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto p = random_sparse_polynomial(3, 3, 6, derive_key(0xd0, i));
    for (unsigned ell : {1u, 2u}) {
      const auto r = check_derivative_identity(p, ell, 1'000'000, derive_key(0xd1, i * 8 + ell), 0.05, 1);
      const double exact = oracle::derivative_mean_square(p, ell);
      const bool rhs_ok = std::abs(r.rhs - exact) <= 1e-9 * (1 + exact);
      ok += r.pass && rhs_ok && r.relative_error <= 0.05;
      ++total;
      worst = std::max(worst, r.relative_error);
    }
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " within 5%, worst relative error " +
                           fmt("%.4f", worst)};
}

// -- 7, 8 -------------------------------------------------------------------

std::vector<SparsePolynomial> probability_polys() {
  std::vector<SparsePolynomial> out;
  for (unsigned d : {2u, 3u}) {
    auto batch = unit_norm_ensemble(3, d, 2, derive_key(0xcb, d));
    out.insert(out.end(), batch.begin(), batch.end());
  }
  return out;
}

Verdict anticoncentration() {
  const auto polys = probability_polys();
  const std::vector<double> eps{1e-2, 1e-3};
  const auto rep = check_carbery_wright(polys, eps, 10'000'000, 3.0, 0x1e, 1);
  double worst = 0.0;
  bool ok = rep.all_pass();
  for (const auto& r : rep.rows) {
    ok = ok && std::abs(r.bound - 3.0 * r.degree * std::pow(r.level, 1.0 / r.degree)) <= 1e-12 * r.bound;
    worst = std::max(worst, r.probability / r.bound);
  }
  return {ok, std::to_string(rep.rows.size()) + " rows, worst probability/bound " + fmt("%.4f", worst)};
}

Verdict tail_bound() {
  const auto polys = probability_polys();
  const std::vector<double> levels{2.0, 4.0, 6.0};
  const auto rep = check_tail_bound(polys, levels, 10'000'000, 10.0, 0x7a, 1);
  double worst = 0.0;
  bool ok = rep.all_pass();
  for (const auto& r : rep.rows) {
    ok = ok && std::abs(r.bound - 10.0 * std::pow(2.0, -std::pow(r.level / 2.0, 2.0 / r.degree))) <= 1e-12 * r.bound;
    worst = std::max(worst, r.probability / r.bound);
  }
  return {ok, std::to_string(rep.rows.size()) + " rows, worst probability/bound " + fmt("%.4f", worst) +
                  (rep.monotone ? ", monotone in N" : ", NOT monotone in N")};
}

// -- 9 ----------------------------------------------------------------------

Verdict prop4_scaling() {
  const auto grid = square_grid(0.01, 9);
  const std::vector<double> shells{0.2, 0.1, 0.05};
  const auto rep = check_prop4_1d(3, grid, shells, 41);
  const bool ok = rep.loglog_slope >= 2.5 && std::abs(linear_sign_expectation(0.0, 0.0)) <= 1e-12 &&
                  std::abs(rep.center_value) <= 1e-12 && rep.pass;
  return {ok, "log-log slope " + fmt("%.3f", rep.loglog_slope) + ", value at (0,0) " + fmt("%.3g", rep.center_value)};
}

// -- 10 ---------------------------------------------------------------------

Verdict seed_accounting_check() {
  bool ok = true;
  int configs = 0;
  for (unsigned k : {1u, 2u}) {
    for (double eps : {0.5, 0.25, 0.1}) {
      for (std::size_t n : {2u, 8u, 100u, 5000u}) {
        const auto a = plan(n, 1, k, eps, 200);
        const auto b = plan(2 * n, 1, k, eps, 200);
        const std::size_t kk = a.sampler.independence();
        ok = ok && total_seed_bits(a) == a.ell * kk * (ceil_log2(a.sampler.q()) + 16);
        ok = ok && total_seed_bits(b) == b.ell * kk * (ceil_log2(b.sampler.q()) + 16);
        const long long growth = static_cast<long long>(total_seed_bits(b)) - static_cast<long long>(total_seed_bits(a));
        const long long allowed = static_cast<long long>(a.ell * kk) *
                                  (static_cast<long long>(ceil_log2(b.sampler.q())) - ceil_log2(a.sampler.q()));
        ok = ok && a.ell == b.ell && growth <= allowed;
        ++configs;
      }
    }
  }
  return {ok, std::to_string(configs) + " (k, eps, n) configurations checked"};
}

// -- 11 ---------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Verdict determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("ptfprg_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = PTFPRG_CLI;
  const std::string sample_cfg = R"('{"n":8,"d":1,"k":2,"epsilon":0.25,"ell_cap":200}')";
  const std::string fool_cfg =
      R"('{"ensemble":{"n":8,"d":1,"count":5},"generator":{"epsilons":[0.5,0.25],"k":2,"ell_cap":200}}')";
  bool ok = true;
  std::vector<std::string> samples, fools, logs;
  const unsigned jobs[] = {1, 1, 4};
  for (int run = 0; run < 3; ++run) {
    const fs::path s = dir / ("sample" + std::to_string(run) + ".jsonl");
    const fs::path f = dir / ("fool" + std::to_string(run) + ".csv");
    const std::string j = " --jobs " + std::to_string(jobs[run]);
    const std::string c1 = cli + " sample --config " + sample_cfg + " --seed 5eed --samples 5000" + j + " --out " + s.string();
    const std::string c2 = cli + " fool --config " + fool_cfg + " --seed 5eed --samples 20000" + j + " --out " + f.string();
    ok = ok && std::system(c1.c_str()) == 0 && std::system(c2.c_str()) == 0;
    samples.push_back(slurp(s));
    fools.push_back(slurp(f));
    logs.push_back(slurp(f.string() + ".jsonl"));
  }
  const bool nonempty = !samples[0].empty() && !fools[0].empty() && !logs[0].empty();
  const bool same = samples[0] == samples[1] && samples[0] == samples[2] && fools[0] == fools[1] &&
                    fools[0] == fools[2] && logs[0] == logs[1] && logs[0] == logs[2];
  fs::remove_all(dir);
  return {ok && nonempty && same, std::string("sample and fool outputs ") + (same ? "byte-identical" : "DIFFER") +
                                      " across 2 runs with --jobs 1 and 1 run with --jobs 4"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "quadrature exactness", 1, quadrature_exactness},
      {2, "exhaustive k-wise uniformity", 1, kwise_uniformity},
      {3, "design moments by enumeration", 120, design_moments},
      {4, "degree-1 fooling", 300, degree1_fooling},
      {5, "fooling trend", 600, fooling_trend},
      {6, "derivative-moment identity", 120, derivative_identity},
      {7, "anticoncentration bound", 300, anticoncentration},
      {8, "tail bound", 300, tail_bound},
      {9, "1-D residual scaling", 30, prop4_scaling},
      {10, "seed accounting", 1, seed_accounting_check},
      {11, "determinism", 60, determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = v.ok && in_time;
    failed += !pass;
    std::printf("%s  %2d  %-32s %8.2fs / %gs  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                c.limit_seconds, v.detail.c_str(), in_time ? "" : " [over time limit]");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
