#include <gtest/gtest.h>

#include <random>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace nlreg;

namespace {

// Linear single-valued graph x -> M x in R^{n+m}, as two inequalities per row.
Polyhedron linear_graph(const Mat& M, std::size_t n) {
  Mat A;
  Vec b;
  for (std::size_t i = 0; i < M.size(); ++i) {
    Vec a(n + M.size(), 0.0);
    for (std::size_t j = 0; j < n; ++j) a[j] = -M[i][j];
    a[n + i] = 1;
    A.push_back(a);
    for (double& v : a) v = -v;
    A.push_back(a);
    b.push_back(0);
    b.push_back(0);
  }
  return Polyhedron::make(n + M.size(), A, b);
}

Polyhedron ray() { return Polyhedron::make(1, {{-1}}, {0}); }

// minimize -x2 s.t. x2 <= 0, x1 = 0, at xbar = 0.
OptInstance lp_instance() {
  OptInstance in;
  in.n = 2;
  in.p = in.q = in.r = 1;
  in.S = Polyhedron::whole(2);
  in.C = in.D = in.Q = ray();
  in.F_graph = linear_graph({{0, -1}}, 2);
  in.G_graph = linear_graph({{0, 1}}, 2);
  in.H_graph = linear_graph({{1, 0}}, 2);
  in.xbar = {0, 0};
  in.ybar = {0};
  in.zbar = {0};
  return in;
}

const CriticalTriple kZero{{0, 0}, {0}, {0}};

}  // namespace

TEST(Optcond, InstanceValidation) {
  auto in = lp_instance();
  EXPECT_NO_THROW(in.validate());
  in.zbar = {1};  // not in -D and not G(xbar)
  EXPECT_THROW(in.validate(), Error);
  auto flat = lp_instance();
  flat.D = Polyhedron::make(1, {{-1}, {1}}, {0, 0});
  try {
    flat.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invariant);
  }
}

TEST(Optcond, CriticalDirectionsIncludeZero) {
  auto in = lp_instance();
  auto ts = critical_directions(in, Sampler{});
  ASSERT_FALSE(ts.empty());
  auto f = first_order(in);
  bool zero = false;
  for (const auto& t : ts) {
    EXPECT_TRUE(is_critical(in, f, t));
    EXPECT_EQ(t.v, Vec{0.0});  // -bd Q = {0}
    if (norm_inf(t.u) == 0) zero = true;
  }
  EXPECT_TRUE(zero);
}

TEST(Optcond, DroppingTheKernelConditionAddsDirections) {
  auto in = lp_instance();
  auto free = lp_instance();
  free.H_graph = linear_graph({{0, 0}}, 2);
  EXPECT_GT(critical_directions(free, Sampler{}).size(), critical_directions(in, Sampler{}).size());
}

TEST(Optcond, MultipliersOfTheLinearProgram) {
  auto in = lp_instance();
  auto res = find_multipliers(in, kZero, Sampler{});
  ASSERT_TRUE(res.mult);
  const auto& m = *res.mult;
  EXPECT_NEAR(m.v[0], 0.5, 1e-9);
  EXPECT_NEAR(m.k[0], 0.5, 1e-9);
  EXPECT_NEAR(m.w[0], 0.0, 1e-9);
  EXPECT_NEAR(norm1(m.flat()), 1.0, 1e-9);
  Sampler dense;
  dense.count = 256;
  dense.seed = 7;
  auto v = check_multiplier_rule(in, kZero, m, dense);
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.samples, 256u);
  EXPECT_EQ(v.rhs, 0.0);
  EXPECT_GE(v.margin, -1e-9);
}

TEST(Optcond, RuleWithUnitMultipliers) {
  auto in = lp_instance();
  auto v = check_multiplier_rule(in, kZero, {{1}, {1}, {0}}, Sampler{});
  EXPECT_TRUE(v.holds);
  EXPECT_NEAR(v.margin, 0.0, 1e-9);
  // The H term is w* x1 over all of IT2(S) = R^2, so w* must vanish.
  for (double w : {1.0, -1.0}) {
    auto bad = check_multiplier_rule(in, kZero, {{1}, {1}, {w}}, Sampler{});
    EXPECT_FALSE(bad.holds) << w;
    ASSERT_TRUE(bad.worst_x);
  }
}

TEST(Optcond, MultiplierInvariantsRejected) {
  auto in = lp_instance();
  auto expect_precondition = [&](const CriticalTriple& t, const Multipliers& m, const char* what) {
    try {
      check_multiplier_rule(in, t, m, Sampler{});
      FAIL() << what;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::precondition);
      EXPECT_NE(std::string(e.what()).find(what), std::string::npos) << e.what();
    }
  };
  expect_precondition({{0, 0}, {1}, {0}}, {{1}, {1}, {0}}, "<v*, v>");
  expect_precondition(kZero, {{1}, {-1}, {0}}, "N(-D, zbar)");
  expect_precondition(kZero, {{-1}, {1}, {0}}, "Q*");
  expect_precondition(kZero, {{0}, {0}, {0}}, "all zero");
}

TEST(Optcond, ConstraintQualification) {
  auto in = lp_instance();
  auto cq = check_cq(in, kZero, Sampler{});
  EXPECT_TRUE(cq.holds);
  // Normality: with the CQ, the multiplier found has v* != 0.
  auto res = find_multipliers(in, kZero, Sampler{});
  ASSERT_TRUE(res.mult);
  EXPECT_GT(std::abs(res.mult->v[0]), 1e-9);

  auto zeroH = lp_instance();
  zeroH.H_graph = linear_graph({{0, 0}}, 2);
  auto bad = check_cq(zeroH, kZero, Sampler{});
  EXPECT_FALSE(bad.holds);
  ASSERT_TRUE(bad.deficiency);
  EXPECT_GT(norm_inf(*bad.deficiency), 0.0);
}

TEST(Optcond, Claim2ConfirmsForLinearSurjectiveH) {
  auto in = lp_instance();
  auto v = check_claim2(in, kZero, BallExtension{1.0}, FunctionalModulus::linear(1), 1.0, Sampler{});
  EXPECT_TRUE(v.holds);
  EXPECT_FALSE(v.vacuous());
  EXPECT_EQ(v.failed, 0u);
  EXPECT_GT(v.confirmed, 0u);
}

TEST(Optcond, Claim2Gates) {
  auto in = lp_instance();
  auto gate = [&](const FunctionalModulus& mu, double theta, double scale) {
    try {
      check_claim2(in, kZero, BallExtension{scale}, mu, theta, Sampler{});
      return false;
    } catch (const Error& e) {
      return e.kind() == ErrorKind::precondition;
    }
  };
  EXPECT_TRUE(gate(FunctionalModulus::power(1, 0.5), 1.0, 1.0));
  EXPECT_TRUE(gate(FunctionalModulus::linear(1), 0.5, 1.0));
  EXPECT_FALSE(gate(FunctionalModulus::linear(1), 0.5, 2.0));
}

TEST(Optcond, Claim2SkipsOutsideThePremise) {
  auto in = lp_instance();
  in.S = Polyhedron::make(2, {{0, 1}}, {0});  // x2 <= 0, active at xbar
  Mat xs{{0, 1}, {1, -1}, {0, -1}};
  auto v = check_claim2(in, kZero, BallExtension{1.0}, FunctionalModulus::linear(1), 1.0, Sampler{},
                        4, 12, &xs);
  ASSERT_EQ(v.samples.size(), 3u);
  EXPECT_EQ(v.samples[0].status, "skipped: x is outside IT2(S, xbar, u)");
  EXPECT_EQ(v.samples[1].status, "skipped: 0 is not in D2H(x)");
  EXPECT_EQ(v.samples[2].status, "confirmed");
  EXPECT_EQ(v.confirmed, 1u);
}

// For a polyhedral cone D the adjacent set A2(-D, zbar, k) is itself a cone,
// so sup <k*, d> over it is 0 or +inf and never negative.
TEST(OptcondProperty, EnvelopeSupIsZeroOrInfinite) {
  std::mt19937_64 rng(55);
  int zero = 0, inf = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t q = inst::pick(rng, 1, 3);
    Mat A;
    for (std::size_t i = 0; i < inst::pick(rng, 1, 4); ++i) {
      Vec a(q);
      for (double& v : a) v = inst::unif(rng, -1, 1);
      A.push_back(a);
    }
    auto negD = Polyhedron::make(q, A, Vec(A.size(), 0.0));
    Vec zbar(q, 0.0);
    if (trial % 2) {
      auto pt = negD.chebyshev_point(1.0);
      if (pt.second > 0) zbar = pt.first;
    }
    auto T = tangent_cone(negD, zbar).T;
    Vec k(q);
    for (double& v : k) v = inst::unif(rng, -1, 1);
    if (!T.contains(k, 0)) k.assign(q, 0.0);
    auto A2 = second_order_sets(negD, zbar, k).A2;
    Vec ks(q);
    for (double& v : ks) v = inst::unif(rng, -1, 1);
    LinearProgram lp(q);
    A2.constrain(lp, 0);
    lp.c = ks;
    auto r = solve_lp(lp);
    ASSERT_NE(r.status, LPStatus::infeasible);
    if (r.status == LPStatus::unbounded) {
      ++inf;
    } else {
      EXPECT_NEAR(r.value, 0.0, 1e-9) << "trial " << trial;
      ++zero;
    }
  }
  EXPECT_GT(zero, 20);
  EXPECT_GT(inf, 20);
}
