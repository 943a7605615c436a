#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace nlreg;

namespace {

// Grid {-1, -0.9, ..., 1}; index 10 is 0, index 15 is 0.5.
const FiniteMetricSpace& grid() {
  static const FiniteMetricSpace X = [] {
    std::vector<double> xs;
    for (int i = -10; i <= 10; ++i) xs.push_back(i / 10.0);
    return FiniteMetricSpace::line(xs);
  }();
  return X;
}

EVPInstance quadratic(double eps = 0.3, double lambda = 1, std::size_t x0 = 15) {
  EVPInstance in;
  in.space = &grid();
  for (std::size_t i = 0; i < grid().size(); ++i) {
    double x = grid().coords(i)[0];
    in.f.push_back(x * x);
  }
  in.epsilon = eps;
  in.lambda = lambda;
  in.x0 = x0;
  return in;
}

bool member(const IndexSet& s, std::size_t v) { return std::find(s.begin(), s.end(), v) != s.end(); }

}  // namespace

TEST(Ekeland, QuadraticSolutionMeetsAllThree) {
  auto in = quadratic();
  NumericPolicy pol;
  auto r = evp_solve(in, pol);
  EXPECT_TRUE(evp_verify(in, r.z, pol).all());
  EXPECT_TRUE(evp_verify(in, 10, pol).all());  // z = 0
  auto adm = evp_oracle(in, pol);
  EXPECT_TRUE(member(adm, r.z));
  EXPECT_TRUE(member(adm, 10));
  EXPECT_EQ(adm, oracle::evp_admissible(grid(), in.f, in.epsilon, in.lambda, in.x0, 1e-12));
  EXPECT_TRUE(evp_audit_trace(in, r, pol).all());
}

TEST(Ekeland, ConstantFunctionStopsAtStart) {
  auto in = quadratic();
  std::fill(in.f.begin(), in.f.end(), 2.0);
  auto r = evp_solve(in, NumericPolicy{});
  EXPECT_EQ(r.z, in.x0);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].a, 0.0);
  EXPECT_EQ(r.path_length, 0.0);
}

TEST(Ekeland, StrictMinimizerStays) {
  auto in = quadratic(0.3, 1, 10);
  auto r = evp_solve(in, NumericPolicy{});
  EXPECT_EQ(r.z, 10u);
}

TEST(Ekeland, ConditionsReportedIndependently) {
  auto in = quadratic(0.3, 0.3);
  auto v = evp_verify(in, 10, NumericPolicy{});
  EXPECT_FALSE(v.i);
  EXPECT_TRUE(v.ii);
  EXPECT_TRUE(v.iii);
  EXPECT_DOUBLE_EQ(v.distance, 0.5);

  auto w = evp_verify(quadratic(), 20, NumericPolicy{});  // z = 1 is worse than x0
  EXPECT_FALSE(w.ii);
  EXPECT_FALSE(w.iii);
}

TEST(Ekeland, HugeRadiusLeavesOnlyTwoAndThree) {
  auto in = quadratic(1000, 1000);
  NumericPolicy pol;
  auto adm = evp_oracle(in, pol);
  IndexSet expect;
  for (std::size_t z = 0; z < grid().size(); ++z) {
    auto v = evp_verify(in, z, pol);
    EXPECT_TRUE(v.i);
    if (v.ii && v.iii) expect.push_back(z);
  }
  EXPECT_EQ(adm, expect);
}

TEST(Ekeland, SmallSlopeShrinksToMinimizer) {
  auto in = quadratic(0.26, 10);  // slope 0.026
  auto adm = evp_oracle(in, NumericPolicy{});
  EXPECT_TRUE(member(adm, 10));
  for (std::size_t z : adm) EXPECT_LE(std::abs(grid().coords(z)[0]), 0.1 + 1e-12);
}

TEST(Ekeland, PreconditionsAndCap) {
  auto in = quadratic();
  in.x0 = 20;  // f(x0) = 1 is not below inf f + 0.3
  try {
    evp_solve(in, NumericPolicy{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
  NumericPolicy small;
  small.oracle_cap = 5;
  try {
    evp_oracle(quadratic(), small);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::size);
  }
  auto all_inf = quadratic();
  std::fill(all_inf.f.begin(), all_inf.f.end(), kInf);
  EXPECT_THROW(evp_solve(all_inf, NumericPolicy{}), Error);
}

TEST(Ekeland, InfiniteValuesAreNeverChosen) {
  auto in = quadratic();
  in.f[10] = kInf;
  in.f[0] = kInf;
  auto r = evp_solve(in, NumericPolicy{});
  EXPECT_FALSE(std::isinf(in.f[r.z]));
  EXPECT_TRUE(evp_verify(in, r.z, NumericPolicy{}).all());
}

TEST(EkelandProperty, SolverLandsInOracleSet) {
  std::mt19937_64 rng(99);
  NumericPolicy pol;
  for (int trial = 0; trial < 200; ++trial) {
    auto X = inst::plane(inst::pick(rng, 5, 60), rng, inst::unif(rng, 0.5, 3));
    EVPInstance in;
    in.space = X.get();
    for (std::size_t i = 0; i < X->size(); ++i) in.f.push_back(inst::unif(rng, 0, 2));
    in.epsilon = inst::unif(rng, 0.05, 2);
    in.lambda = inst::unif(rng, 0.1, 2);
    double m = in.inf_f();
    IndexSet starts;
    for (std::size_t i = 0; i < X->size(); ++i)
      if (in.f[i] < m + in.epsilon) starts.push_back(i);
    in.x0 = starts[inst::pick(rng, 0, starts.size() - 1)];
    auto r = evp_solve(in, pol);
    auto adm = oracle::evp_admissible(*X, in.f, in.epsilon, in.lambda, in.x0, 1e-12);
    EXPECT_TRUE(member(adm, r.z)) << "trial " << trial;
    EXPECT_EQ(evp_oracle(in, pol), adm) << "trial " << trial;
    auto audit = evp_audit_trace(in, r, pol);
    EXPECT_TRUE(audit.all()) << "trial " << trial;
    EXPECT_NEAR(audit.path_length, r.path_length, 1e-12);
  }
}
