#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace nlreg;

namespace {

PlainSetValuedMap squares() {
  auto X = share(FiniteMetricSpace::line({0, 0.5, 1}));
  auto Y = share(FiniteMetricSpace::line({0, 0.25, 1}));
  return PlainSetValuedMap(X, Y, {{0, 0}, {1, 1}, {2, 2}});
}

PlainSetValuedMap doubling() {
  auto X = share(FiniteMetricSpace::line({-0.5, 0, 0.5}));
  auto Y = share(FiniteMetricSpace::line({-1, -0.5, 0, 0.5, 1}));
  return PlainSetValuedMap(X, Y, {{0, 0}, {1, 2}, {2, 4}});
}

}  // namespace

TEST(Delta, SmallestLevelAboveDistance) {
  // d(0.25, {1}) = 0.75; the open ball needs t > 0.75, next level 0.8.
  auto F = embed_plain(squares(), TLadder::uniform(0.05, 30), false);
  EXPECT_NEAR(delta(F, 1, 2), 0.8, 1e-12);
  EXPECT_EQ(delta(F, 1, 2), oracle::delta(F, 1, 2));
}

TEST(Delta, MemberAtEveryLevelGivesFirstPositiveLevel) {
  auto X = share(FiniteMetricSpace::line({0, 1}));
  TLadder L({0, 0.3, 0.7});
  ParamSetValuedMap F(X, X, L, {{0, 0, 1}, {0, 1, 1}, {0, 2, 1}});
  EXPECT_DOUBLE_EQ(delta(F, 1, 0), 0.3);
}

TEST(Delta, NeverReachedIsInfinite) {
  auto X = share(FiniteMetricSpace::line({0, 1}));
  ParamSetValuedMap F(X, X, TLadder({0, 1}), {{0, 0, 0}});
  EXPECT_EQ(delta(F, 1, 0), kInf);
}

TEST(InverseAtLevel, DoublingMap) {
  TLadder L({0, 0.2, 0.6, 1.0});
  auto F = embed_plain(doubling(), L, false);
  EXPECT_EQ(inverse_at_level(F, 0.0, 4), (IndexSet{2}));
  EXPECT_EQ(inverse_at_level(F, 0.0, 3), IndexSet{});
  EXPECT_EQ(inverse_at_level(F, 0.6, 4), (IndexSet{2}));
  EXPECT_THROW(inverse_at_level(F, 0.5, 4), Error);
}

TEST(Osc, ShrinkingFibreHolds) {
  // Phi(t) = grid point nearest 1 - t, grid coarser than the ladder.
  std::vector<double> xs{0, 0.5, 1};
  auto X = share(FiniteMetricSpace::line(xs));
  TLadder L = TLadder::uniform(0.1, 11);
  Fibration phi{X, L, {}};
  for (std::size_t k = 0; k < L.size(); ++k) {
    double v = 1 - L[k];
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (std::abs(xs[i] - v) < std::abs(xs[best] - v)) best = i;
    phi.fibres.push_back({best});
  }
  EXPECT_TRUE(outer_semicontinuity_at_zero(phi, 1).holds);

  // Same fibres but Phi(0) = {0.5}: the point nearest 1 is a limit outside.
  phi.fibres[0] = {1};
  auto v = outer_semicontinuity_at_zero(phi, 2);
  EXPECT_FALSE(v.holds);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(*v.witness, 2u);
  EXPECT_EQ(v.levels.size(), 2u);
}

TEST(Osc, EmptyFibresHoldVacuously) {
  auto X = share(FiniteMetricSpace::line({0, 1}));
  Fibration phi{X, TLadder({0, 0.5, 1}), {{}, {}, {}}};
  EXPECT_TRUE(outer_semicontinuity_at_zero(phi, 1).holds);
}

TEST(Embed, OpenAndClosedBoundary) {
  auto X = share(FiniteMetricSpace::line({0, 1}));
  PlainSetValuedMap id(X, X, {{0, 0}, {1, 1}});
  TLadder L({0, 0.5, 1.0, 1.5});
  auto Fo = embed_plain(id, L, false);
  auto Fc = embed_plain(id, L, true);
  EXPECT_TRUE(Fo.contains(0, 3, 1));
  EXPECT_FALSE(Fo.contains(0, 1, 1));
  EXPECT_FALSE(Fo.contains(0, 2, 1));
  EXPECT_TRUE(Fc.contains(0, 2, 1));
  EXPECT_TRUE(Fo.monotone());
}

TEST(Embed, MonotoneFlagValidated) {
  auto X = share(FiniteMetricSpace::line({0, 1}));
  EXPECT_THROW(ParamSetValuedMap(X, X, TLadder({0, 0.5, 1}), {{0, 1, 1}}, true), Error);
}

TEST(Prop41, DoublingMapExactClauseThree) {
  auto F = doubling();
  TLadder L = TLadder::uniform(0.05, 50);
  auto rep = prop41_audit(F, L, NumericPolicy{});
  EXPECT_TRUE(rep.passes());
  ASSERT_NE(rep.find("iii"), nullptr);
  EXPECT_EQ(rep.find("iii")->status, ClauseStatus::pass);
  // (iii) directly: F_t^-1(y) = {x : d(y, F(x)) < t}.
  auto E = embed_plain(F, L, false);
  for (std::size_t k = 1; k < L.size(); ++k)
    for (std::size_t y = 0; y < F.Y().size(); ++y) {
      IndexSet want;
      for (std::size_t x = 0; x < F.X().size(); ++x)
        if (oracle::point_set(F.Y(), y, F.image(x)) < L[k] - 1e-12) want.push_back(x);
      EXPECT_EQ(E.inverse(k, y), want);
    }
}

TEST(Prop41, EmptyImageGivesInfinityOnBothSides) {
  auto X = share(FiniteMetricSpace::line({0, 1}));
  PlainSetValuedMap F(X, X, {{0, 0}});
  auto rep = prop41_audit(F, TLadder::uniform(0.1, 12), NumericPolicy{});
  EXPECT_TRUE(rep.passes());
  EXPECT_EQ(delta(embed_plain(F, TLadder::uniform(0.1, 12), false), 0, 1), kInf);
}

TEST(Prop41, RandomMapsPass) {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    auto X = inst::plane(inst::pick(rng, 2, 12), rng);
    auto Y = inst::plane(inst::pick(rng, 2, 12), rng);
    auto F = inst::random_plain(X, Y, rng, 2, 0.2);
    double diam = Y->diameter();
    TLadder L = TLadder::uniform(diam / 200, 203);
    auto r = prop41_audit(F, L, NumericPolicy{});
    EXPECT_TRUE(r.passes()) << "rep " << rep;
    EXPECT_LE(r.max_delta_error, L.max_gap() + 1e-12);
  }
}

// delta <= t iff membership, for monotone maps at levels above delta.
TEST(SvmapProperties, MonotoneDeltaCharacterisesMembership) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    auto X = inst::plane(6, rng);
    auto Y = inst::plane(5, rng);
    TLadder L = TLadder::uniform(0.1, 8);
    auto F = inst::random_param(X, Y, L, rng, true);
    for (std::size_t x = 0; x < X->size(); ++x)
      for (std::size_t y = 0; y < Y->size(); ++y) {
        double d = delta(F, y, x);
        EXPECT_EQ(d, oracle::delta(F, y, x));
        EXPECT_GT(d, 0.0);
        for (std::size_t k = 1; k < L.size(); ++k)
          EXPECT_EQ(d <= L[k], F.contains(x, k, y));
      }
  }
}

TEST(SvmapProperties, EmbeddingsAreOuterSemicontinuous) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 30; ++rep) {
    auto X = inst::plane(7, rng);
    auto F = inst::random_plain(X, X, rng, 2, 0.1);
    // Below the separation of the points the first level only sees d = 0.
    double sep = kInf;
    for (std::size_t a = 0; a < X->size(); ++a)
      for (std::size_t b = a + 1; b < X->size(); ++b) sep = std::min(sep, oracle::dist(*X, a, b));
    TLadder L = TLadder::uniform(0.99 * sep, 40);
    for (bool closed : {false, true}) {
      auto E = embed_plain(F, L, closed);
      for (std::size_t y = 0; y < X->size(); ++y)
        EXPECT_TRUE(outer_semicontinuity_at_zero(E, y, 1).holds) << "rep " << rep;
    }
  }
}
