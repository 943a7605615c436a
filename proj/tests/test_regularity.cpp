#include <gtest/gtest.h>

#include <random>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace nlreg;

namespace {

// F(x) = 2x on X = {-0.5, 0, 0.5}, Y = {-1, -0.5, 0, 0.5, 1}.
PlainSetValuedMap doubling() {
  auto X = share(FiniteMetricSpace::line({-0.5, 0.0, 0.5}));
  auto Y = share(FiniteMetricSpace::line({-1.0, -0.5, 0.0, 0.5, 1.0}));
  return PlainSetValuedMap(X, Y, {{0, 0}, {1, 2}, {2, 4}});
}

ParamSetValuedMap doubling_closed() { return embed_plain(doubling(), TLadder::uniform(0.25, 13), true); }

PairSet doubling_W() { return product({0, 1, 2}, {0, 2, 4}); }

ParamSetValuedMap grid_identity(std::vector<double> xs, double step, std::size_t count,
                                std::size_t drop = SIZE_MAX) {
  auto X = share(FiniteMetricSpace::line(std::move(xs)));
  std::vector<std::pair<std::size_t, std::size_t>> g;
  for (std::size_t i = 0; i < X->size(); ++i)
    if (i != drop) g.emplace_back(i, i);
  return embed_plain(PlainSetValuedMap(X, X, g), TLadder::uniform(step, count), true);
}

// Brute-force restatement of the regularity inequality.
bool regular_oracle(const ParamSetValuedMap& F, const PairSet& W, const FunctionalModulus& mu) {
  for (auto [x, y] : W)
    if (oracle::point_set(F.X(), x, oracle::zero_fibre(F, y)) > mu(oracle::delta(F, y, x)) + 1e-12)
      return false;
  return true;
}

}  // namespace

TEST(Regularity, DoublingHoldsWithHalf) {
  auto v = check_regular_on_W(doubling_closed(), doubling_W(), FunctionalModulus::linear(0.5),
                              NumericPolicy{});
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.checked, 9u);
}

TEST(Regularity, DoublingFailsWithThird) {
  auto v = check_regular_on_W(doubling_closed(), doubling_W(), FunctionalModulus::linear(1.0 / 3),
                              NumericPolicy{});
  EXPECT_FALSE(v.holds);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->first, 2u);   // x = 0.5
  EXPECT_EQ(v.witness->second, 0u);  // y = -1
  EXPECT_DOUBLE_EQ(v.lhs, 1.0);
  EXPECT_NEAR(v.rhs, 2.0 / 3, 1e-15);
}

TEST(Regularity, EmptyWHolds) {
  auto F = doubling_closed();
  for (auto v : {check_regular_on_W(F, {}, FunctionalModulus::linear(0.01), NumericPolicy{}),
                 check_open_on_W(F, {}, FunctionalModulus::linear(0.01), NumericPolicy{})}) {
    EXPECT_TRUE(v.holds);
    EXPECT_EQ(v.checked, 0u);
  }
}

TEST(Regularity, OutOfRangePairThrows) {
  EXPECT_THROW(check_regular_on_W(doubling_closed(), {{0, 9}}, FunctionalModulus::linear(1),
                                  NumericPolicy{}),
               Error);
}

TEST(Equivalence, StrongFormStrictlyStronger) {
  auto F = grid_identity({0, 0.25, 0.5, 0.75, 1}, 0.125, 11);
  PairSet W = product({0, 1, 2, 3, 4}, {0, 1, 2, 3, 4});
  auto a = equivalence_audit(F, W, FunctionalModulus::linear(1), NumericPolicy{});
  EXPECT_TRUE(a.regular.holds);
  EXPECT_TRUE(a.open.holds);
  EXPECT_FALSE(a.strong.holds);
  EXPECT_TRUE(a.agree);
  EXPECT_TRUE(a.implication_ok);
  EXPECT_TRUE(a.strong_strictly_stronger);

  auto b = equivalence_audit(F, W, FunctionalModulus::linear(2), NumericPolicy{});
  EXPECT_TRUE(b.strong.holds);
  EXPECT_FALSE(b.strong_strictly_stronger);
}

TEST(Equivalence, RegularAndOpenAgreeOnRandomMaps) {
  std::mt19937_64 rng(11);
  int holds = 0, fails = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto X = inst::line(inst::pick(rng, 2, 8), rng);
    auto Y = inst::line(inst::pick(rng, 2, 6), rng);
    TLadder L = TLadder::uniform(inst::unif(rng, 0.02, 0.2), inst::pick(rng, 3, 12));
    auto F = inst::random_param(X, Y, L, rng, trial % 2 == 0);
    auto mu = inst::random_modulus(static_cast<std::size_t>(trial), rng);
    PairSet W;
    for (std::size_t x = 0; x < X->size(); ++x)
      for (std::size_t y = 0; y < Y->size(); ++y)
        if (inst::unif(rng) < 0.6) W.emplace_back(x, y);
    auto a = equivalence_audit(F, W, mu, NumericPolicy{});
    EXPECT_TRUE(a.agree) << "trial " << trial;
    EXPECT_TRUE(a.implication_ok) << "trial " << trial;
    EXPECT_EQ(a.regular.holds, regular_oracle(F, W, mu)) << "trial " << trial;
    (a.regular.holds ? holds : fails)++;
  }
  EXPECT_GT(holds, 20);
  EXPECT_GT(fails, 20);
}

TEST(NuRegularity, InfiniteNuKeepsW) {
  auto F = doubling_closed();
  auto W = doubling_W();
  auto mu = FunctionalModulus::linear(1.0 / 3);
  auto r = check_nu_regular_on_W(F, W, mu, std::vector<double>(W.size(), kInf), NumericPolicy{});
  EXPECT_EQ(r.reduced, W);
  auto plain = check_regular_on_W(F, W, mu, NumericPolicy{});
  EXPECT_EQ(r.verdict.holds, plain.holds);
  EXPECT_EQ(r.verdict.witness, plain.witness);
}

TEST(NuRegularity, TinyNuIsVacuous) {
  auto F = doubling_closed();
  auto W = doubling_W();
  auto r = check_nu_regular_on_W(F, W, FunctionalModulus::linear(1.0 / 3),
                                 std::vector<double>(W.size(), 1e-6), NumericPolicy{});
  EXPECT_TRUE(r.reduced.empty());
  EXPECT_TRUE(r.verdict.holds);
}

TEST(NuRegularity, MixedNuDropsTheFarPairs) {
  auto F = doubling_closed();
  auto W = doubling_W();
  auto mu = FunctionalModulus::linear(1.0 / 3);
  // Every violating pair has delta >= 1; nu = 0.3 keeps only delta = 0.25.
  std::vector<double> nu(W.size(), 0.3);
  auto r = check_nu_regular_on_W(F, W, mu, nu, NumericPolicy{});
  PairSet expect;
  for (auto [x, y] : W)
    if (mu(oracle::delta(F, y, x)) < 0.3) expect.push_back({x, y});
  EXPECT_EQ(r.reduced, expect);
  EXPECT_TRUE(r.verdict.holds);
  EXPECT_THROW(check_nu_regular_on_W(F, W, mu, std::vector<double>(W.size(), 0.0), NumericPolicy{}),
               Error);
  EXPECT_THROW(check_nu_regular_on_W(F, W, mu, {1.0}, NumericPolicy{}), Error);
}

TEST(LocalRegularity, GlobalGivesWholeSpaces) {
  auto F = grid_identity({0, 0.1, 0.2, 0.3}, 0.05, 21);
  auto r = check_local_regularity(F, 0, 0, FunctionalModulus::linear(1), NumericPolicy{});
  EXPECT_TRUE(r.holds);
  EXPECT_DOUBLE_EQ(r.r_U, 0.3);
  EXPECT_DOUBLE_EQ(r.r_V, 0.3);
  ASSERT_EQ(r.frontier.size(), 1u);
}

TEST(LocalRegularity, FarViolationShrinksTheBall) {
  // y = 0.4 has no preimage: every pair (x, 0.4) fails, nothing else does.
  auto F = grid_identity({0, 0.1, 0.2, 0.3, 0.4}, 0.05, 21, 4);
  auto r = check_local_regularity(F, 0, 0, FunctionalModulus::linear(1), NumericPolicy{});
  EXPECT_TRUE(r.holds);
  EXPECT_DOUBLE_EQ(r.r_U, 0.4);
  EXPECT_DOUBLE_EQ(r.r_V, 0.3);
  for (auto [ru, rv] : r.frontier) EXPECT_LT(rv, 0.4);
}

TEST(LocalRegularity, NearViolationLeavesSingletons) {
  auto F = grid_identity({0, 0.1, 0.2, 0.3}, 0.05, 21);
  auto r = check_local_regularity(F, 0, 0, FunctionalModulus::linear(0.5), NumericPolicy{});
  EXPECT_FALSE(r.holds);
  EXPECT_NE(r.verdict.find("fails at resolution"), std::string::npos);
}

TEST(LocalRegularity, CentreMustBeInGraph) {
  auto F = doubling_closed();
  try {
    check_local_regularity(F, 1, 0, FunctionalModulus::linear(0.5), NumericPolicy{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}
