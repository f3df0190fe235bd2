#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ptfprg/harness.hpp"

using namespace ptfprg;

namespace {

SparsePolynomial x1() { return SparsePolynomial::variable(1, 0); }

}  // namespace

TEST(Gap, GaussianSourceAgainstAnalytic) {
  const PTF f = random_ptf({5, 1, 3});
  const auto g = estimate_gap(f, GaussianSource(5, 11), 1'000'000, Baseline::analytic());
  EXPECT_LE(std::abs(g.gap), 4 * g.stderr_);
  EXPECT_EQ(g.n_samples_baseline, 0u);
  EXPECT_NEAR(g.ci_high - g.ci_low, 2 * 1.96 * g.stderr_, 1e-15);
}

TEST(Gap, IdenticalStreamsGiveZero) {
  const PTF f = random_ptf({3, 2, 9});
  const GaussianSource a(3, 77), b(3, 77);
  const auto g = estimate_gap_between(f, a, 50000, b, 50000);
  EXPECT_EQ(g.gap, 0.0);
}

TEST(Gap, AnalyticBaselineValue) {
  const PTF f(SparsePolynomial(2, SparsePolynomial::TermMap{{{1, 0}, 1.0}, {{0, 0}, -1.0}}));
  const auto g = estimate_gap(f, GaussianSource(2, 1), 1000, Baseline::analytic());
  EXPECT_NEAR(g.e_baseline, -0.682689492137, 1e-11);
  EXPECT_THROW(estimate_gap(PTF(x1() * x1()), GaussianSource(1, 1), 10, Baseline::analytic()), ParameterError);
  EXPECT_THROW(estimate_gap(f, GaussianSource(3, 1), 10, Baseline::analytic()), DimensionError);
}

TEST(Gap, JobsDoNotChangeResults) {
  std::vector<PTF> fs;
  for (int i = 0; i < 4; ++i) fs.push_back(random_ptf({4, 2, static_cast<std::uint64_t>(i)}));
  const auto cfg = plan(4, 1, 1, 0.5);
  const GeneratorSource src(cfg, 5);
  const auto base = Baseline::monte_carlo(30000, 8);
  const auto a = estimate_gaps(std::span<const PTF>(fs), src, 20000, base, 1);
  const auto b = estimate_gaps(std::span<const PTF>(fs), src, 20000, base, 4);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    EXPECT_EQ(a[i].e_gen, b[i].e_gen);
    EXPECT_EQ(a[i].e_baseline, b[i].e_baseline);
  }
}

TEST(Anticoncentration, LinearCase) {
  const std::vector<SparsePolynomial> ps{x1()};
  const std::vector<double> eps{0.01, 0.0};
  const std::uint64_t n = 2'000'000;
  const auto rep = check_carbery_wright(ps, eps, n, 3.0, 4);
  const double exact = 2 * normal_cdf(0.01) - 1;  // about 2 phi(0) eps
  EXPECT_NEAR(exact, 0.00798, 1e-5);
  const double p = rep.rows[0].probability;
  EXPECT_NEAR(p, exact, 4 * std::sqrt(exact / n));
  EXPECT_NEAR(p / rep.rows[0].reference, 0.8, 0.05);
  EXPECT_EQ(rep.rows[1].hits, 0u);
  EXPECT_TRUE(rep.all_pass());
}

TEST(Anticoncentration, QuadraticCase) {
  const std::vector<SparsePolynomial> ps{x1() * x1() - SparsePolynomial::constant(1, 1.0)};
  const std::vector<double> eps{1e-4};
  const auto rep = check_carbery_wright(ps, eps, 1'000'000, 3.0, 2);
  EXPECT_NEAR(rep.rows[0].bound, 3 * 2 * 1e-2, 1e-15);
  EXPECT_TRUE(rep.rows[0].pass);
}

TEST(Tail, LinearCase) {
  const std::vector<SparsePolynomial> ps{x1()};
  const std::vector<double> levels{3.0, 0.0};
  const std::uint64_t n = 2'000'000;
  const auto rep = check_tail_bound(ps, levels, n, 1.0, 6);
  const double exact = 2 * (1 - normal_cdf(3.0));
  EXPECT_NEAR(exact, 0.0027, 1e-4);
  EXPECT_NEAR(rep.rows[0].probability, exact, 4 * std::sqrt(exact / n));
  EXPECT_NEAR(rep.rows[0].bound, std::pow(2.0, -2.25), 1e-15);
  EXPECT_LE(rep.rows[1].probability, 1.0);
  EXPECT_EQ(rep.rows[1].bound, 1.0);
  EXPECT_TRUE(rep.all_pass());
}

TEST(Tail, MonotoneInN) {
  const auto ps = unit_norm_ensemble(3, 2, 3, 12);
  const std::vector<double> levels{2.0, 4.0, 6.0};
  const auto rep = check_tail_bound(ps, levels, 200000, 10.0, 1);
  EXPECT_TRUE(rep.monotone);
  EXPECT_TRUE(rep.all_pass());
}

TEST(Derivative, Examples) {
  const auto sq = x1() * x1();
  const auto r1 = check_derivative_identity(sq, 1, 1'000'000, 3);
  EXPECT_NEAR(r1.rhs, 4.0, 1e-12);
  EXPECT_LE(r1.relative_error, 0.05);
  EXPECT_TRUE(r1.pass);

  const auto p = random_sparse_polynomial(3, 3, 6, 1);
  const auto r0 = check_derivative_identity(p, 0, 400000, 4);
  EXPECT_NEAR(r0.rhs, oracle::mean_square(p), 1e-9);
  EXPECT_TRUE(r0.pass);

  const auto rz = check_derivative_identity(x1(), 2, 1000, 5);
  EXPECT_EQ(rz.rhs, 0.0);
  EXPECT_EQ(rz.lhs, 0.0);
  EXPECT_TRUE(rz.pass);
}

TEST(Derivative, RandomSparseAgainstOracle) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto p = random_sparse_polynomial(3, 3, 6, s);
    EXPECT_EQ(p.degree(), 3u);
    EXPECT_LE(p.terms().size(), 6u);
    for (unsigned ell : {1u, 2u}) {
      const auto r = check_derivative_identity(p, ell, 300000, s, 0.05, 2);
      EXPECT_NEAR(r.rhs, oracle::derivative_mean_square(p, ell), 1e-9 * (1 + r.rhs));
      EXPECT_LE(std::abs(r.lhs - r.rhs), 5 * r.stderr_ + 1e-12);
    }
  }
}

TEST(ResidualScaling, ExpansionFacts) {
  EXPECT_EQ(linear_sign_expectation(0.0, 0.0), 0.0);
  const double h = 1e-6;
  const double db = (linear_sign_expectation(0, h) - linear_sign_expectation(0, -h)) / (2 * h);
  EXPECT_NEAR(db, std::sqrt(2 / M_PI), 1e-8);
  EXPECT_NEAR(linear_sign_expectation(0.2, 0.3), oracle::sign_expectation(-0.3 / 1.2), 1e-10);
}

TEST(ResidualScaling, ResidualScaling) {
  const auto grid = square_grid(0.01, 9);
  EXPECT_EQ(grid.size(), 81u);
  const std::vector<double> shells{0.2, 0.1, 0.05};
  const auto rep = check_prop4_1d(3, grid, shells, 41);
  EXPECT_LE(std::abs(rep.center_value), 1e-12);
  EXPECT_NEAR(rep.slope_b, std::sqrt(2 / M_PI), 1e-4);
  EXPECT_GE(rep.loglog_slope, 2.5);
  EXPECT_TRUE(rep.pass);
  ASSERT_EQ(rep.shells.size(), 3u);
  EXPECT_GT(rep.shells[0].max_residual, rep.shells[2].max_residual);
}
