#pragma once

// Seeded random instances. Each generator returns an instance document that
// parse_instance accepts, with construction constants under "meta".

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "io.hpp"

namespace nlreg {

enum class GenKind { plain_lipschitz, param_monotone, evp, polyhedral_opt };

inline GenKind parse_gen_kind(const std::string& s) {
  if (s == "plain-lipschitz") return GenKind::plain_lipschitz;
  if (s == "param-monotone") return GenKind::param_monotone;
  if (s == "evp") return GenKind::evp;
  if (s == "polyhedral-opt") return GenKind::polyhedral_opt;
  raise(ErrorKind::schema, "unknown generator kind \"" + s + "\"");
}

inline const char* to_string(GenKind k) {
  switch (k) {
    case GenKind::plain_lipschitz: return "plain-lipschitz";
    case GenKind::param_monotone: return "param-monotone";
    case GenKind::evp: return "evp";
    case GenKind::polyhedral_opt: return "polyhedral-opt";
  }
  return "?";
}

inline std::size_t generator_cap(GenKind k) {
  switch (k) {
    case GenKind::plain_lipschitz: return 2000;
    case GenKind::param_monotone: return 200;
    case GenKind::evp: return 10000;
    case GenKind::polyhedral_opt: return 6;
  }
  return 0;
}

namespace detail {

inline json line_space(const std::vector<double>& xs) {
  json pts = json::array();
  for (double x : xs) pts.push_back({x});
  return {{"metric", "euclidean"}, {"points", pts}};
}

inline json plane_space(std::size_t n, double side, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, side);
  json pts = json::array();
  for (std::size_t i = 0; i < n; ++i) pts.push_back({U(rng), U(rng)});
  return {{"metric", "euclidean"}, {"points", pts}};
}

// Monotone increasing single-valued map on the line. Inverse slopes are at
// most 1 / (1.001 / kappa) < kappa, so kappa bounds the best modulus with
// room for rounding.
inline json gen_plain_lipschitz(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double kappa = 1.0 + 3.0 * U(rng);
  std::vector<double> xs{0.0}, ys{0.0};
  for (std::size_t i = 1; i < n; ++i) {
    double dx = 0.01 + 0.2 * U(rng);
    double slope = 1.001 / kappa + (2.0 - 1.001 / kappa) * U(rng);
    xs.push_back(xs.back() + dx);
    ys.push_back(ys.back() + slope * dx);
  }
  json graph = json::array();
  for (std::size_t i = 0; i < n; ++i) graph.push_back({i, i});
  const double diam = ys.back() - ys.front();
  json ladder = json::array();
  for (int i = 0; i <= 65; ++i) ladder.push_back(diam * i / 64.0);  // top above diam Y
  json j;
  j["X"] = line_space(xs);
  j["Y"] = line_space(ys);
  j["plain_graph"] = graph;
  j["ladder"] = ladder;
  j["W"] = "all";
  j["moduli"] = {{"mu", {{"kind", "linear"}, {"c", kappa}}}};
  j["query"] = {{"k", 1.0}, {"xbar", n / 2}, {"ybar", n / 2}};
  j["plan"] = {"modulus_fit", "prop41_audit", "t61_audit"};
  j["meta"] = {{"kappa_true", kappa}};
  return j;
}

// Thresholds make (x, t, y) members from some level upwards.
inline json gen_param_monotone(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::size_t L = 16;
  json ladder = json::array();
  for (std::size_t i = 0; i < L; ++i) ladder.push_back(static_cast<double>(i) / (L - 1));
  json graph = json::array();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      double r = U(rng);
      if (r < 0.15) {
        for (std::size_t t = 0; t < L; ++t) graph.push_back({x, t, y});
      } else if (r < 0.8) {
        std::size_t from = 1 + static_cast<std::size_t>(U(rng) * (L - 1));
        for (std::size_t t = std::min(from, L - 1); t < L; ++t) graph.push_back({x, t, y});
      }
    }
  json j;
  j["X"] = plane_space(n, 1.0, rng);
  j["Y"] = plane_space(n, 1.0, rng);
  j["ladder"] = ladder;
  j["graph"] = graph;
  j["monotone"] = true;
  j["W"] = "all";
  j["moduli"] = {{"mu", {{"kind", "linear"}, {"c", 0.5 + 2.0 * U(rng)}}}};
  j["query"] = {{"x", 0}, {"y", 0}, {"t", ladder.back()}};
  j["sequences"] = {{"a", {{"geometric", {1.0, 0.5}}}}, {"b", {{"geometric", {1.0, 0.5}}}}};
  j["plan"] = {"equivalence_audit", "monotone"};
  return j;
}

inline json gen_evp(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  json space = plane_space(n, 10.0, rng);
  std::vector<double> f(n);
  for (auto& v : f) v = U(rng) < 0.05 ? kInf : 10.0 * U(rng);
  std::size_t x0 = static_cast<std::size_t>(U(rng) * n) % n;
  while (std::isinf(f[x0])) x0 = (x0 + 1) % n;
  double m = *std::min_element(f.begin(), f.end());
  json j;
  j["X"] = space;
  j["evp"] = {{"f", io::vec(f)},
              {"epsilon", f[x0] - m + 0.1 + 2.0 * U(rng)},
              {"lambda", 0.5 + 4.5 * U(rng)},
              {"x0", x0}};
  j["plan"] = {"ekeland"};
  return j;
}

inline json rows_to_json(const Mat& A, const Vec& b, std::size_t dim) {
  json a = json::array();
  for (const auto& r : A) a.push_back(r);
  return {{"dim", dim}, {"A", a}, {"b", b}};
}

// Graph of x -> M x as two inequalities per output coordinate.
inline json linear_graph(const Mat& M, std::size_t n) {
  const std::size_t m = M.size();
  Mat A;
  Vec b;
  for (std::size_t i = 0; i < m; ++i)
    for (double s : {1.0, -1.0}) {
      Vec row(n + m, 0.0);
      for (std::size_t j = 0; j < n; ++j) row[j] = -s * M[i][j];
      row[n + i] = s;
      A.push_back(row);
      b.push_back(0.0);
    }
  return rows_to_json(A, b, n + m);
}

inline json orthant(std::size_t m) {
  Mat A;
  for (std::size_t i = 0; i < m; ++i) {
    Vec row(m, 0.0);
    row[i] = -1.0;
    A.push_back(row);
  }
  return rows_to_json(A, Vec(m, 0.0), m);
}

// min c.x over S, M_G x <= 0, M_H x = 0 with xbar = 0 optimal: c is minus a
// nonnegative combination of active constraint normals, so the KKT
// conditions hold by construction.
inline json gen_polyhedral_opt(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.1, 1.0);
  std::uniform_int_distribution<std::size_t> small(1, 2);
  const std::size_t q = small(rng), r = 1, active = small(rng), inactive = small(rng);
  auto rnd = [&](std::size_t rows) {
    Mat M(rows, Vec(n));
    for (auto& row : M)
      for (double& v : row) v = std::round(U(rng) * 4.0) / 4.0;
    return M;
  };
  Mat AI = rnd(active), AN = rnd(inactive), MG = rnd(q), MH = rnd(r);
  Vec c(n, 0.0);
  for (const auto& row : AI) {
    double a = P(rng);
    for (std::size_t j = 0; j < n; ++j) c[j] -= a * row[j];
  }
  for (const auto& row : MG) {
    double a = P(rng);
    for (std::size_t j = 0; j < n; ++j) c[j] -= a * row[j];
  }
  for (const auto& row : MH) {
    double a = U(rng);
    for (std::size_t j = 0; j < n; ++j) c[j] -= a * row[j];
  }
  Mat SA = AI;
  Vec Sb(active, 0.0);
  for (const auto& row : AN) {
    SA.push_back(row);
    Sb.push_back(0.5 + P(rng));
  }
  json o;
  o["S"] = rows_to_json(SA, Sb, n);
  o["C"] = orthant(1);
  o["Q"] = orthant(1);
  o["D"] = orthant(q);
  o["F_graph"] = linear_graph({c}, n);
  o["G_graph"] = linear_graph(MG, n);
  o["H_graph"] = linear_graph(MH, n);
  o["base"] = {Vec(n, 0.0), Vec(1, 0.0), Vec(q, 0.0)};
  json j;
  j["optcond"] = o;
  j["moduli"] = {{"mu", {{"kind", "linear"}, {"c", 1.0}}}};
  j["plan"] = {"optcond_multipliers", "optcond_cq"};
  j["meta"] = {{"objective", c}};
  return j;
}

}  // namespace detail

inline json generate_instance(GenKind kind, std::size_t size, std::uint64_t seed) {
  if (size == 0) raise(ErrorKind::size, "size must be positive");
  if (size > generator_cap(kind))
    raise(ErrorKind::size, std::string(to_string(kind)) + " size " + std::to_string(size) +
                               " exceeds the cap of " + std::to_string(generator_cap(kind)));
  if (kind == GenKind::plain_lipschitz && size < 2) raise(ErrorKind::size, "plain-lipschitz needs size >= 2");
  std::mt19937_64 rng(seed);
  json j;
  switch (kind) {
    case GenKind::plain_lipschitz: j = detail::gen_plain_lipschitz(size, rng); break;
    case GenKind::param_monotone: j = detail::gen_param_monotone(size, rng); break;
    case GenKind::evp: j = detail::gen_evp(size, rng); break;
    case GenKind::polyhedral_opt: j = detail::gen_polyhedral_opt(size, rng); break;
  }
  j["version"] = kFormatVersion;
  j["policy"] = policy_to_json(NumericPolicy{});
  j["policy"]["seed"] = seed;
  j["meta"]["generator"] = to_string(kind);
  j["meta"]["size"] = size;
  j["meta"]["seed"] = seed;
  return j;
}

}  // namespace nlreg
