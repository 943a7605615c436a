#include <gtest/gtest.h>

#include <random>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace nlreg;

TEST(PointSetDistance, MinOverSet) {
  auto X = FiniteMetricSpace::line({0, 1, 2});
  EXPECT_DOUBLE_EQ(point_set_distance(X, 0, {1, 2}), 1.0);
}

TEST(PointSetDistance, EmptySetIsInfinite) {
  auto X = FiniteMetricSpace::line({0, 1, 2});
  EXPECT_EQ(point_set_distance(X, 0, {}), kInf);
}

TEST(PointSetDistance, MatrixLookup) {
  auto X = FiniteMetricSpace::from_matrix({{0, 3, 5}, {3, 0, 4}, {5, 4, 0}});
  EXPECT_DOUBLE_EQ(point_set_distance(X, 0, {1, 2}), 3.0);
}

TEST(Ball, OpenExcludesBoundaryNeighbours) {
  auto X = FiniteMetricSpace::line({0, 0.5, 1});
  EXPECT_EQ(ball_members(X, {0, 0.6, BallKind::open}), (IndexSet{0, 1}));
}

TEST(Ball, ZeroRadiusOpenBallIsCentre) {
  auto X = FiniteMetricSpace::line({0, 0.5, 1});
  EXPECT_EQ(ball_members(X, {0, 0.0, BallKind::open}), (IndexSet{0}));
}

TEST(Ball, ClosedIncludesBoundary) {
  auto X = FiniteMetricSpace::line({0, 0.5, 1});
  EXPECT_EQ(ball_members(X, {1, 0.5, BallKind::closed}), (IndexSet{0, 1, 2}));
}

TEST(Ball, NegativeRadiusIsDomainError) {
  auto X = FiniteMetricSpace::line({0, 1});
  try {
    ball_members(X, {0, -1.0, BallKind::closed});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

TEST(Excess, Conventions) {
  auto X = FiniteMetricSpace::line({0, 1, 2});
  EXPECT_DOUBLE_EQ(excess(X, {1, 2}, {0}), 2.0);
  EXPECT_DOUBLE_EQ(excess(X, {}, {0}), 0.0);
  EXPECT_EQ(excess(X, {0}, {}), kInf);
}

TEST(Space, TriangleViolationNamesTheTriple) {
  try {
    FiniteMetricSpace::from_matrix({{0, 1, 2.001}, {1, 0, 1}, {2.001, 1, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invariant);
    EXPECT_NE(std::string(e.what()).find("(0,1,2)"), std::string::npos);
  }
}

TEST(Space, CoincidentPointsRejected) {
  EXPECT_THROW(FiniteMetricSpace::line({0, 1, 1}), Error);
}

TEST(Space, MetricsAgreeWithDefinitions) {
  std::vector<std::vector<double>> pts{{0, 0}, {3, 4}, {-1, 2}};
  auto E = FiniteMetricSpace::from_points(pts, Metric::euclidean);
  auto M = FiniteMetricSpace::from_points(pts, Metric::manhattan);
  auto C = FiniteMetricSpace::from_points(pts, Metric::chebyshev);
  EXPECT_DOUBLE_EQ(E(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(M(0, 1), 7.0);
  EXPECT_DOUBLE_EQ(C(0, 1), 4.0);
  EXPECT_DOUBLE_EQ(C(1, 2), 4.0);
  double diam = 0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) diam = std::max(diam, oracle::dist(E, i, j));
  EXPECT_DOUBLE_EQ(E.diameter(), diam);
  EXPECT_DOUBLE_EQ(C.diameter(), 4.0);
}

// Distance shrinks as the set grows; balls grow with the radius.
TEST(MetricProperties, MonotoneUnderInclusion) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    auto X = inst::plane(15, rng);
    for (std::size_t x = 0; x < X->size(); ++x) {
      IndexSet S, T;
      for (std::size_t p = 0; p < X->size(); ++p) {
        double r = inst::unif(rng);
        if (r < 0.2) S.push_back(p);
        if (r < 0.5) T.push_back(p);
      }
      if (S.empty()) continue;
      EXPECT_LE(point_set_distance(*X, x, T), point_set_distance(*X, x, S));
      EXPECT_DOUBLE_EQ(point_set_distance(*X, x, S), oracle::point_set(*X, x, S));
      double r1 = inst::unif(rng), r2 = r1 + inst::unif(rng);
      for (auto kind : {BallKind::open, BallKind::closed})
        EXPECT_TRUE(is_subset(ball_members(*X, {x, r1, kind}), ball_members(*X, {x, r2, kind})));
    }
  }
}

TEST(MetricProperties, ExcessZeroIffContained) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    auto X = inst::plane(8, rng);
    IndexSet A, B;
    for (std::size_t p = 0; p < X->size(); ++p) {
      if (inst::unif(rng) < 0.4) A.push_back(p);
      if (inst::unif(rng) < 0.6) B.push_back(p);
    }
    EXPECT_EQ(excess(*X, A, B) == 0.0, is_subset(A, B));
  }
}
