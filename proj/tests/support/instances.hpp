#pragma once

// Seeded random instances shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <nlreg/nlreg.hpp>

namespace inst {

using namespace nlreg;

inline double unif(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Sorted, separated points on the line.
inline std::vector<double> line_points(std::size_t n, std::mt19937_64& rng, double lo = 0.01,
                                       double hi = 0.2) {
  std::vector<double> xs{0.0};
  for (std::size_t i = 1; i < n; ++i) xs.push_back(xs.back() + unif(rng, lo, hi));
  return xs;
}

inline SpacePtr line(std::size_t n, std::mt19937_64& rng) {
  return share(FiniteMetricSpace::line(line_points(n, rng)));
}

inline SpacePtr plane(std::size_t n, std::mt19937_64& rng, double side = 1.0) {
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({unif(rng, 0, side), unif(rng, 0, side)});
  return share(FiniteMetricSpace::from_points(std::move(pts), Metric::euclidean));
}

// Graph with each x mapped to `per` random points (possibly none).
inline PlainSetValuedMap random_plain(SpacePtr X, SpacePtr Y, std::mt19937_64& rng,
                                      std::size_t per_max = 2, double empty_p = 0.0) {
  std::vector<std::pair<std::size_t, std::size_t>> g;
  for (std::size_t x = 0; x < X->size(); ++x) {
    if (unif(rng) < empty_p) continue;
    std::size_t k = pick(rng, 1, per_max);
    for (std::size_t i = 0; i < k; ++i) g.emplace_back(x, pick(rng, 0, Y->size() - 1));
  }
  return PlainSetValuedMap(std::move(X), std::move(Y), std::move(g));
}

// Monotone increasing single-valued map between two random line grids with
// slopes in [lo, hi].
struct LineMap {
  PlainSetValuedMap F;
  double slope_lo = 0, slope_hi = 0;
};

inline LineMap bilipschitz_line(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::vector<double> xs{0.0}, ys{0.0};
  for (std::size_t i = 1; i < n; ++i) {
    double dx = unif(rng, 0.01, 0.2);
    xs.push_back(xs.back() + dx);
    ys.push_back(ys.back() + unif(rng, lo, hi) * dx);
  }
  auto X = share(FiniteMetricSpace::line(xs));
  auto Y = share(FiniteMetricSpace::line(ys));
  std::vector<std::pair<std::size_t, std::size_t>> g;
  for (std::size_t i = 0; i < n; ++i) g.emplace_back(i, i);
  return {PlainSetValuedMap(X, Y, std::move(g)), lo, hi};
}

// Parametric map with random membership; monotone when asked.
inline ParamSetValuedMap random_param(SpacePtr X, SpacePtr Y, const TLadder& L,
                                      std::mt19937_64& rng, bool monotone, double p = 0.3) {
  std::vector<Triple> g;
  for (std::size_t x = 0; x < X->size(); ++x)
    for (std::size_t y = 0; y < Y->size(); ++y) {
      if (monotone) {
        double r = unif(rng);
        if (r < p * 0.3) {
          for (std::size_t t = 0; t < L.size(); ++t) g.push_back({x, t, y});
        } else if (r < p * 2.5) {
          std::size_t from = pick(rng, 1, L.size() - 1);
          for (std::size_t t = from; t < L.size(); ++t) g.push_back({x, t, y});
        }
      } else {
        for (std::size_t t = 0; t < L.size(); ++t)
          if (unif(rng) < p) g.push_back({x, t, y});
      }
    }
  return ParamSetValuedMap(std::move(X), std::move(Y), L, g, monotone);
}

// One of the three modulus families: linear, power (k <= 1), piecewise
// linear table.
inline FunctionalModulus random_modulus(std::size_t family, std::mt19937_64& rng) {
  switch (family % 3) {
    case 0: return FunctionalModulus::linear(unif(rng, 0.2, 3.0));
    case 1: return FunctionalModulus::power(unif(rng, 0.2, 3.0), unif(rng, 0.3, 1.0));
    default: {
      std::vector<double> s{0.0}, v{0.0};
      for (int i = 0; i < 4; ++i) {
        s.push_back(s.back() + unif(rng, 0.1, 0.5));
        v.push_back(v.back() + unif(rng, 0.05, 1.0));
      }
      return FunctionalModulus::table(s, v, false);
    }
  }
}

}  // namespace inst
