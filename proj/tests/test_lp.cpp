#include <gtest/gtest.h>

#include <random>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace nlreg;

TEST(LP, SmallKnownOptimum) {
  // max x + y, x + 2y <= 4, 3x + y <= 6, x, y >= 0: optimum at (1.6, 1.2).
  LinearProgram lp(2);
  lp.nonneg = {1, 1};
  lp.c = {1, 1};
  lp.add_row({1, 2}, Sense::le, 4);
  lp.add_row({3, 1}, Sense::le, 6);
  auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LPStatus::optimal);
  EXPECT_NEAR(r.value, 2.8, 1e-12);
  EXPECT_NEAR(r.x[0], 1.6, 1e-12);
  EXPECT_NEAR(r.x[1], 1.2, 1e-12);
}

TEST(LP, EqualityAndFreeVariables) {
  // max -x, x + y = 1, y <= 3, x free: x = -2.
  LinearProgram lp(2);
  lp.c = {-1, 0};
  lp.add_row({1, 1}, Sense::eq, 1);
  lp.add_row({0, 1}, Sense::le, 3);
  auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LPStatus::optimal);
  EXPECT_NEAR(r.x[0], -2, 1e-12);
  EXPECT_LE(lp_violation(lp, r.x), 1e-12);
}

TEST(LP, DegenerateCyclingExample) {
  // The classical cycling instance under the textbook pivot rule.
  LinearProgram lp(4);
  lp.nonneg = {1, 1, 1, 1};
  lp.c = {0.75, -20, 0.5, -6};
  lp.add_row({0.25, -8, -1, 9}, Sense::le, 0);
  lp.add_row({0.5, -12, -0.5, 3}, Sense::le, 0);
  lp.add_row({0, 0, 1, 0}, Sense::le, 1);
  auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LPStatus::optimal);
  EXPECT_NEAR(r.value, 1.25, 1e-12);
}

TEST(LP, UnboundedGivesRay) {
  LinearProgram lp(2);
  lp.nonneg = {1, 1};
  lp.c = {1, -1};
  lp.add_row({-1, 1}, Sense::le, 1);
  auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LPStatus::unbounded);
  ASSERT_EQ(r.ray.size(), 2u);
  EXPECT_GT(dot(lp.c, r.ray), 0);
  EXPECT_LE(-r.ray[0] + r.ray[1], 1e-12);
  EXPECT_GE(r.ray[0], -1e-12);
  EXPECT_GE(r.ray[1], -1e-12);
}

TEST(LP, InfeasibleGivesFarkas) {
  LinearProgram lp(1);
  lp.add_row({1}, Sense::le, 0);
  lp.add_row({1}, Sense::ge, 1);
  auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LPStatus::infeasible);
  EXPECT_TRUE(farkas_valid(lp, r.farkas));
  EXPECT_FALSE(farkas_valid(lp, {0.0, 0.0}));
}

// Against vertex enumeration on random bounded LPs in R^2 and R^3.
TEST(LPProperty, MatchesVertexEnumeration) {
  std::mt19937_64 rng(17);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t n = inst::pick(rng, 2, 3);
    Mat A;
    Vec b;
    for (std::size_t j = 0; j < n; ++j) {
      Vec e(n, 0.0);
      e[j] = 1;
      A.push_back(e);
      b.push_back(inst::unif(rng, 0.5, 3));
      e[j] = -1;
      A.push_back(e);
      b.push_back(inst::unif(rng, 0.5, 3));
    }
    std::size_t extra = inst::pick(rng, 1, 4);
    for (std::size_t k = 0; k < extra; ++k) {
      Vec a(n);
      for (double& v : a) v = inst::unif(rng, -1, 1);
      A.push_back(a);
      b.push_back(inst::unif(rng, -2, 1));
    }
    Vec c(n);
    for (double& v : c) v = inst::unif(rng, -1, 1);

    LinearProgram lp(n);
    lp.c = c;
    for (std::size_t i = 0; i < A.size(); ++i) lp.add_row(A[i], Sense::le, b[i]);
    auto r = solve_lp(lp);
    auto ref = oracle::max_over_vertices(A, b, c);
    if (ref.feasible) {
      ASSERT_EQ(r.status, LPStatus::optimal) << "trial " << trial;
      EXPECT_NEAR(r.value, ref.value, 1e-7) << "trial " << trial;
      EXPECT_LE(lp_violation(lp, r.x), 1e-8);
      ++optimal;
    } else {
      ASSERT_EQ(r.status, LPStatus::infeasible) << "trial " << trial;
      EXPECT_TRUE(farkas_valid(lp, r.farkas)) << "trial " << trial;
      ++infeasible;
    }
  }
  EXPECT_GT(optimal, 50);
  EXPECT_GT(infeasible, 20);
}
