#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ptfprg/ptf.hpp"

using namespace ptfprg;

TEST(Ptf, SignConvention) {
  const PTF f(SparsePolynomial::variable(1, 0));
  EXPECT_EQ(eval_ptf(f, std::vector<double>{2.0}), 1);
  EXPECT_EQ(eval_ptf(f, std::vector<double>{0.0}), 1);
  EXPECT_EQ(eval_ptf(f, std::vector<double>{-0.1}), -1);
  const PTF g(SparsePolynomial(1, SparsePolynomial::TermMap{{{2}, 1.0}, {{0}, -1.0}}));
  EXPECT_EQ(eval_ptf(g, std::vector<double>{0.0}), -1);
  EXPECT_THROW(eval_ptf(f, std::vector<double>{1.0, 2.0}), DimensionError);
}

TEST(Ptf, RandomEnsemble) {
  for (unsigned d : {1u, 2u, 3u}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const RandomPolyConfig cfg{4, d, s};
      const auto f = random_ptf(cfg);
      EXPECT_EQ(f.poly(), random_ptf(cfg).poly());
      EXPECT_LE(f.degree(), d);
      EXPECT_NEAR(l2_norm(f.poly()), 1.0, 1e-9);
      EXPECT_NEAR(oracle::mean_square(f.poly()), 1.0, 1e-9);
    }
  }
  EXPECT_NE(random_ptf({4, 2, 1}).poly(), random_ptf({4, 2, 2}).poly());
  EXPECT_THROW(random_ptf({0, 1, 0}), ParameterError);
}

TEST(Ptf, MultiIndices) {
  const auto all = multi_indices_up_to(3, 2);
  EXPECT_EQ(all.size(), 10u);
  EXPECT_EQ(all.front(), (Exponents{0, 0, 0}));
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LE(total_degree(all[i - 1]), total_degree(all[i]));
}

TEST(Halfspace, Expectation) {
  const std::vector<double> e1{1.0, 0.0};
  EXPECT_NEAR(halfspace_expectation(e1, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(halfspace_expectation(e1, 1.0), -0.682689492137, 1e-11);
  const std::vector<double> w{0.3, -1.1, 0.4};
  const std::vector<double> w2{0.6, -2.2, 0.8};
  EXPECT_NEAR(halfspace_expectation(w, 0.7), halfspace_expectation(w2, 1.4), 1e-15);
  EXPECT_THROW(halfspace_expectation(std::vector<double>{0.0, 0.0}, 1.0), ParameterError);

  EXPECT_NEAR(halfspace_expectation(e1, 1.0), oracle::sign_expectation(1.0), 1e-10);
  EXPECT_NEAR(halfspace_expectation(w, -0.4), oracle::sign_expectation(-0.4 / std::sqrt(0.09 + 1.21 + 0.16)), 1e-10);
}

TEST(Halfspace, FromPtf) {
  const PTF f(SparsePolynomial(2, SparsePolynomial::TermMap{{{1, 0}, 2.0}, {{0, 1}, -1.0}, {{0, 0}, 0.5}}));
  const auto h = as_halfspace(f);
  ASSERT_TRUE(h);
  EXPECT_EQ(h->w, (std::vector<double>{2.0, -1.0}));
  EXPECT_EQ(h->theta, -0.5);
  EXPECT_FALSE(as_halfspace(PTF(SparsePolynomial(1, SparsePolynomial::TermMap{{{2}, 1.0}}))));
}
