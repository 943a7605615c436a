#include <gtest/gtest.h>

#include <random>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace nlreg;

namespace {

const Mat kOrthantA{{-1, 0}, {0, -1}};
const Vec kOrthantB{0, 0};

Polyhedron orthant() { return Polyhedron::make(2, kOrthantA, kOrthantB); }

// Random polyhedron with some rows active at xbar and the others slack.
struct RandomPoly {
  Mat A;
  Vec b;
  Vec xbar;
};

RandomPoly random_poly(std::size_t n, std::mt19937_64& rng) {
  RandomPoly p;
  p.xbar.resize(n);
  for (double& v : p.xbar) v = inst::unif(rng, -1, 1);
  std::size_t rows = inst::pick(rng, 1, 5);
  for (std::size_t i = 0; i < rows; ++i) {
    Vec a(n);
    for (double& v : a) v = inst::unif(rng, -1, 1);
    double slack = inst::unif(rng) < 0.6 ? 0.0 : inst::unif(rng, 0.1, 1);
    p.b.push_back(oracle::row_dot(a, p.xbar) + slack);
    p.A.push_back(std::move(a));
  }
  return p;
}

Vec random_vec(std::size_t n, std::mt19937_64& rng) {
  Vec v(n);
  for (double& x : v) x = inst::unif(rng, -1, 1);
  return v;
}

// v in cone{a_i} by a feasibility LP on the combination weights.
bool in_generated_cone(const Mat& gens, const Vec& v) {
  LinearProgram lp(gens.size());
  for (auto& f : lp.nonneg) f = 1;
  for (std::size_t j = 0; j < v.size(); ++j) {
    Vec row(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) row[i] = gens[i][j];
    lp.add_row(row, Sense::eq, v[j]);
  }
  return solve_lp(lp).status == LPStatus::optimal;
}

}  // namespace

TEST(Tangent, OrthantAtEdgePoint) {
  auto tc = tangent_cone(orthant(), {0, 1});
  EXPECT_EQ(tc.active, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(tc.T.contains({0, -1}, 1e-12));
  EXPECT_TRUE(tc.T.contains({1, -5}, 1e-12));
  EXPECT_FALSE(tc.T.contains({-0.1, 0}, 1e-12));
  EXPECT_FALSE(tc.IT.contains({0, -1}, 1e-12));
  EXPECT_TRUE(tc.IT.contains({0.5, -1}, 1e-12));
}

TEST(Tangent, OrthantAtCornerAndInterior) {
  auto corner = tangent_cone(orthant(), {0, 0});
  EXPECT_EQ(corner.active.size(), 2u);
  EXPECT_TRUE(corner.T.contains({1, 0}, 1e-12));
  EXPECT_FALSE(corner.T.contains({1, -0.1}, 1e-12));
  auto inside = tangent_cone(orthant(), {1, 1});
  EXPECT_TRUE(inside.active.empty());
  EXPECT_TRUE(inside.T.contains({-3, -4}, 1e-12));
  EXPECT_TRUE(inside.IT.contains({-3, -4}, 1e-12));
}

TEST(Tangent, BasePointOutsideIsRejected) {
  try {
    tangent_cone(orthant(), {-1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
  EXPECT_THROW(tangent_cone(orthant(), {0, 0, 0}), Error);
}

TEST(SecondOrder, OrthantAlongEdge) {
  auto s = second_order_sets(orthant(), {0, 0}, {1, 0});
  EXPECT_TRUE(s.T2.contains({-1, 0}, 1e-12));
  EXPECT_TRUE(s.T2.contains({-1, 2}, 1e-12));
  EXPECT_FALSE(s.T2.contains({0, -1}, 1e-12));
  EXPECT_TRUE(s.A2.contains({-1, 0}, 1e-12));
  EXPECT_FALSE(s.IT2.contains({-1, 0}, 1e-12));
  EXPECT_TRUE(s.IT2.contains({-1, 0.5}, 1e-12));
  EXPECT_THROW(second_order_sets(orthant(), {0, 0}, {-1, 0}), Error);
}

TEST(Polyhedron, MakeNormalizesAndDropsZeroRows) {
  auto P = Polyhedron::make(2, {{3, 4}, {0, 0}}, {5, 1});
  ASSERT_EQ(P.rows(), 1u);
  EXPECT_NEAR(P.A[0][0], 0.6, 1e-15);
  EXPECT_NEAR(P.b[0], 1.0, 1e-15);
  try {
    Polyhedron::make(2, {{0, 0}}, {-1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invariant);
  }
}

TEST(Polyhedron, InteriorSamples) {
  std::mt19937_64 rng(3);
  auto cone = tangent_cone(orthant(), {0, 0}).IT;
  auto pts = sample_interior(cone, 50, rng);
  ASSERT_EQ(pts.size(), 50u);
  for (const auto& p : pts) EXPECT_TRUE(cone.contains(p, 0));
  // {x = 0} as a cone has empty interior.
  auto flat = Polyhedron::make(1, {{1}, {-1}}, {0, 0});
  flat.strict = true;
  EXPECT_TRUE(sample_interior(flat, 10, rng).empty());
}

TEST(Lifted, ProjectionAndTangent) {
  // {(v, h) : v <= h, h <= 0} projects to v <= 0.
  Lifted L{Polyhedron::make(2, {{1, -1}, {0, 1}}, {0, 0}), 1};
  EXPECT_TRUE(L.contains({-1}));
  EXPECT_FALSE(L.contains({0.5}));
  auto full = L.lift({0});
  ASSERT_TRUE(full);
  auto T = L.tangent_at(*full);
  EXPECT_TRUE(T.contains({-1}));
  EXPECT_FALSE(T.contains({1}));
}

TEST(PolyhedralProperty, TangentConeMatchesDefinition) {
  std::mt19937_64 rng(21);
  int members = 0, non = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = inst::pick(rng, 2, 3);
    auto rp = random_poly(n, rng);
    auto P = Polyhedron::make(n, rp.A, rp.b);
    auto tc = tangent_cone(P, rp.xbar);
    for (int k = 0; k < 10; ++k) {
      Vec d = random_vec(n, rng);
      bool want = oracle::tangent_member(rp.A, rp.b, rp.xbar, d);
      EXPECT_EQ(tc.T.contains(d, 1e-12), want) << "trial " << trial;
      EXPECT_EQ(sampled_limit_member(P, rp.xbar, d), want) << "trial " << trial;
      (want ? members : non)++;
    }
  }
  EXPECT_GT(members, 300);
  EXPECT_GT(non, 300);
}

TEST(PolyhedralProperty, SecondOrderMatchesDefinition) {
  std::mt19937_64 rng(22);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = inst::pick(rng, 2, 3);
    auto rp = random_poly(n, rng);
    auto P = Polyhedron::make(n, rp.A, rp.b);
    auto tc = tangent_cone(P, rp.xbar);
    Vec u(n, 0.0);
    if (trial % 3 != 0) {
      u = random_vec(n, rng);
      if (!tc.T.contains(u, 0)) continue;
    }
    auto s = second_order_sets(P, rp.xbar, u);
    for (int k = 0; k < 10; ++k) {
      Vec w = random_vec(n, rng);
      bool want = oracle::second_order_member(rp.A, rp.b, rp.xbar, u, w);
      EXPECT_EQ(s.T2.contains(w, 1e-12), want) << "trial " << trial;
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

// The tangent cone and the cone generated by the active normals are polar:
// v is a nonnegative combination of the normals iff v.d <= 0 on T.
TEST(PolyhedralProperty, NormalConeIsPolarOfTangent) {
  std::mt19937_64 rng(23);
  int inside = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 2;
    auto rp = random_poly(n, rng);
    auto P = Polyhedron::make(n, rp.A, rp.b);
    auto tc = tangent_cone(P, rp.xbar);
    Vec v = random_vec(n, rng);
    // max v.d over T within the box |d| <= 1, by vertex enumeration.
    Mat A = tc.T.A;
    Vec b(A.size(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      Vec e(n, 0.0);
      e[j] = 1;
      A.push_back(e);
      b.push_back(1);
      e[j] = -1;
      A.push_back(e);
      b.push_back(1);
    }
    auto best = oracle::max_over_vertices(A, b, v);
    ASSERT_TRUE(best.feasible);
    bool polar = best.value <= 1e-9;
    bool gen = tc.normal_generators.empty() ? oracle::row_dot(v, v) == 0
                                            : in_generated_cone(tc.normal_generators, v);
    EXPECT_EQ(polar, gen) << "trial " << trial;
    if (gen) ++inside;
  }
  EXPECT_GT(inside, 10);
}
