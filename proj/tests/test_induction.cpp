#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace nlreg;

namespace {

// Phi(a) = {1 - a} on the grid {1 - 2^-n} plus {1}; ladder {0} and 2^-n.
struct Dyadic {
  Fibration phi;
  std::size_t one = 0;
};

Dyadic dyadic(int K) {
  std::vector<double> xs;
  for (int n = 0; n <= K; ++n) xs.push_back(1 - std::ldexp(1.0, -n));
  xs.push_back(1.0);
  std::vector<double> lv{0.0};
  for (int n = K; n >= 0; --n) lv.push_back(std::ldexp(1.0, -n));
  Dyadic d;
  d.one = xs.size() - 1;
  d.phi = Fibration{share(FiniteMetricSpace::line(xs)), TLadder(lv), {}};
  d.phi.fibres.push_back({d.one});
  for (int n = K; n >= 0; --n) d.phi.fibres.push_back({static_cast<std::size_t>(n)});
  return d;
}

}  // namespace

TEST(Preconditions, DyadicAllPass) {
  auto d = dyadic(10);
  auto a = SequenceSpec::geometric(1, 0.5), b = SequenceSpec::geometric(1, 0.5);
  auto r = verify_preconditions(d.phi, 1.0, 0, a, b, NumericPolicy{});
  EXPECT_TRUE(r.a4);
  EXPECT_TRUE(r.a2);
  EXPECT_TRUE(r.a3);
  EXPECT_DOUBLE_EQ(r.sum_b, 2.0);
}

TEST(Preconditions, TightBudgetFailsAtFirstStep) {
  auto d = dyadic(10);
  auto r = verify_preconditions(d.phi, 1.0, 0, SequenceSpec::geometric(1, 0.5),
                                SequenceSpec::geometric(0.25, 0.5), NumericPolicy{});
  EXPECT_FALSE(r.a3);
  ASSERT_TRUE(r.a3_fail_n);
  EXPECT_EQ(*r.a3_fail_n, 0u);
  EXPECT_DOUBLE_EQ(r.a3_distance, 0.5);
  EXPECT_DOUBLE_EQ(r.a3_budget, 0.25);
}

// An empty fibre is never reached as a vacuous step: the covering condition
// of the step before it already fails at distance +inf.
TEST(Preconditions, EmptyFibreFailsTheStepBefore) {
  auto d = dyadic(6);
  d.phi.fibres[d.phi.ladder.require_index(0.25)] = {};
  auto r = verify_preconditions(d.phi, 1.0, 0, SequenceSpec::geometric(1, 0.5),
                                SequenceSpec::geometric(1, 0.5), NumericPolicy{});
  EXPECT_FALSE(r.a3);
  EXPECT_EQ(*r.a3_fail_n, 1u);
  EXPECT_EQ(r.a3_distance, kInf);
}

TEST(Preconditions, StartOutsideFibreIsPreconditionError) {
  auto d = dyadic(4);
  try {
    verify_preconditions(d.phi, 1.0, 1, SequenceSpec::geometric(1, 0.5),
                         SequenceSpec::geometric(1, 0.5), NumericPolicy{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Preconditions, OffLadderStartIsDomainError) {
  auto d = dyadic(4);
  EXPECT_THROW(verify_preconditions(d.phi, 0.7, 0, SequenceSpec::geometric(0.7, 0.5),
                                    SequenceSpec::geometric(1, 0.5), NumericPolicy{}),
               Error);
}

TEST(Induction, DyadicReachesOne) {
  auto d = dyadic(10);
  auto tr = run_induction(d.phi, 1.0, 0, SequenceSpec::geometric(1, 0.5),
                          SequenceSpec::geometric(1, 0.5), NumericPolicy{});
  ASSERT_EQ(tr.status, TraceStatus::certified);
  EXPECT_EQ(*tr.witness, d.one);
  EXPECT_DOUBLE_EQ(tr.distance, 1.0);
  EXPECT_DOUBLE_EQ(tr.bound, 2.0);
  EXPECT_LT(tr.distance, tr.bound);
}

TEST(Induction, BallFibresOnFineGrid) {
  // Phi(a) = closed ball around 1 - a of radius a/4, grid step 0.01.
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(i / 100.0);
  auto X = share(FiniteMetricSpace::line(xs));
  std::vector<double> lv{0.0};
  for (int n = 5; n >= 0; --n) lv.push_back(std::ldexp(1.0, -n));
  Fibration phi{X, TLadder(lv), {}};
  for (double a : lv) {
    IndexSet f;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (std::abs(xs[i] - (1 - a)) <= a / 4 + 1e-12) f.push_back(i);
    phi.fibres.push_back(f);
  }
  auto a = SequenceSpec::geometric(1, 0.5), b = SequenceSpec::geometric(0.7, 0.5);
  NumericPolicy pol;
  EXPECT_TRUE(verify_preconditions(phi, 1.0, 0, a, b, pol).passes());
  auto tr = run_induction(phi, 1.0, 0, a, b, pol);
  ASSERT_EQ(tr.status, TraceStatus::certified);
  EXPECT_EQ(*tr.witness, 100u);
  EXPECT_TRUE(contains(phi.at(0), *tr.witness));
  EXPECT_LT(oracle::dist(*X, 0, *tr.witness), b.total());
  EXPECT_TRUE(oracle::induction(phi, 1.0, 0, a, b, pol.horizon, pol.tol_strict).certified);
}

TEST(Induction, RestrictionExcludingTheLimitFails) {
  auto d = dyadic(8);
  IndexSet U;
  for (std::size_t i = 0; i < d.one; ++i) U.push_back(i);
  auto tr = run_induction(d.phi, 1.0, 0, SequenceSpec::geometric(1, 0.5),
                          SequenceSpec::geometric(1, 0.5), NumericPolicy{}, U);
  EXPECT_EQ(tr.status, TraceStatus::precondition_failed);
  EXPECT_EQ(tr.failed_condition, "A3");
  EXPECT_FALSE(tr.witness);
}

TEST(Induction, Deterministic) {
  auto d = dyadic(6);
  auto run = [&] {
    return run_induction(d.phi, 1.0, 0, SequenceSpec::geometric(1, 0.5),
                         SequenceSpec::geometric(1, 0.5), NumericPolicy{});
  };
  auto a = run(), b = run();
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) EXPECT_EQ(a.steps[i].next, b.steps[i].next);
}

TEST(Sequence, TailsAndTables) {
  auto g = SequenceSpec::geometric(1, 0.5);
  EXPECT_DOUBLE_EQ(g.total(), 2.0);
  EXPECT_DOUBLE_EQ(g.tail_from(3), 0.25);
  auto t = SequenceSpec::explicit_table({0.5, 0.25});
  EXPECT_DOUBLE_EQ(t.term(5), 0.0);
  EXPECT_DOUBLE_EQ(t.total(), 0.75);
  EXPECT_THROW(SequenceSpec::geometric(1, 1.0), Error);
  EXPECT_THROW(SequenceSpec::explicit_table({}), Error);
}

// Random small fibrations: certified verdict matches layered path search,
// and every certified trace re-validates step by step.
TEST(InductionProperties, AgreesWithPathSearchOracle) {
  std::mt19937_64 rng(2024);
  int certified = 0, failed = 0;
  for (int rep = 0; rep < 400; ++rep) {
    std::size_t n = inst::pick(rng, 3, 12);
    auto X = inst::plane(n, rng);
    TLadder L = TLadder::uniform(0.2, inst::pick(rng, 3, 6));
    auto F = inst::random_param(X, X, L, rng, rep % 2 == 0, 0.35);
    std::size_t y = inst::pick(rng, 0, n - 1);
    Fibration phi = F.fibration(y);
    std::size_t top = L.size() - 1;
    if (phi.at(top).empty()) continue;
    std::size_t x = phi.at(top)[inst::pick(rng, 0, phi.at(top).size() - 1)];
    double t = L[top];
    auto a = SequenceSpec::geometric(t, inst::unif(rng, 0.3, 0.8));
    auto b = SequenceSpec::geometric(inst::unif(rng, 0.2, 1.2), inst::unif(rng, 0.3, 0.8));
    NumericPolicy pol;
    auto tr = run_induction(phi, t, x, a, b, pol);
    auto o = oracle::induction(phi, t, x, a, b, pol.horizon, pol.tol_strict);
    ASSERT_EQ(tr.status == TraceStatus::certified, o.certified) << "rep " << rep;
    if (o.certified) {
      ++certified;
      EXPECT_TRUE(contains(phi.at(0), *tr.witness));
      EXPECT_LT(oracle::dist(*X, x, *tr.witness), b.total());
      double walked = 0;
      for (const auto& s : tr.steps) {
        EXPECT_LT(oracle::dist(*X, s.x_n, s.next), s.b_n);
        walked += oracle::dist(*X, s.x_n, s.next);
      }
      EXPECT_GE(walked + 1e-12, tr.distance);
    } else {
      ++failed;
    }
  }
  EXPECT_GT(certified, 20);
  EXPECT_GT(failed, 20);
}
