#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "metric_space.hpp"
#include "modulus.hpp"
#include "numeric.hpp"
#include "svmap.hpp"

namespace nlreg {

// (x, y) index pairs.
using PairSet = std::vector<std::pair<std::size_t, std::size_t>>;

inline PairSet product(const IndexSet& U, const IndexSet& V) {
  PairSet out;
  out.reserve(U.size() * V.size());
  for (std::size_t x : U)
    for (std::size_t y : V) out.emplace_back(x, y);
  return out;
}

// Outcome of an exhaustive check over a pair set. On failure the witness is
// the pair with the largest violation lhs - rhs, ties broken by the smallest
// (y, x).
struct PairVerdict {
  bool holds = true;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  double lhs = 0;
  double rhs = 0;
  std::size_t checked = 0;
};

namespace detail {

struct WorstTracker {
  PairVerdict v;
  double worst = -kInf;

  void violation(std::size_t x, std::size_t y, double lhs, double rhs) {
    v.holds = false;
    double gap = lhs - rhs;
    if (std::isnan(gap)) gap = kInf;
    bool better = !v.witness || gap > worst ||
                  (gap == worst && std::make_pair(y, x) <
                                       std::make_pair(v.witness->second, v.witness->first));
    if (better) {
      worst = gap;
      v.witness = {x, y};
      v.lhs = lhs;
      v.rhs = rhs;
    }
  }
};

inline void check_pairs(const ParamSetValuedMap& F, const PairSet& W) {
  for (auto [x, y] : W) {
    F.X().check_index(x);
    F.Y().check_index(y);
  }
}

}  // namespace detail

// d(x, F0^-1(y)) <= mu(delta(y,F,x)) on W.
inline PairVerdict check_regular_on_W(const ParamSetValuedMap& F, const PairSet& W,
                                      const FunctionalModulus& mu, const NumericPolicy& pol) {
  detail::check_pairs(F, W);
  detail::WorstTracker w;
  std::vector<std::optional<IndexSet>> zero(F.Y().size());
  for (auto [x, y] : W) {
    if (!zero[y]) zero[y] = F.inverse(0, y);
    double lhs = point_set_distance(F.X(), x, *zero[y]);
    double rhs = mu(delta(F, y, x));
    ++w.v.checked;
    if (!le_tol(lhs, rhs, pol.tol_strict)) w.violation(x, y, lhs, rhs);
  }
  return w.v;
}

// y in F(B(x,t),0) for every t > mu(delta). On a finite space the
// intersection of the open balls over t > r is the closed ball of radius r,
// so the quantifier over t is decided there.
inline PairVerdict check_open_on_W(const ParamSetValuedMap& F, const PairSet& W,
                                   const FunctionalModulus& mu, const NumericPolicy& pol) {
  detail::check_pairs(F, W);
  detail::WorstTracker w;
  for (auto [x, y] : W) {
    ++w.v.checked;
    double r = mu(delta(F, y, x));
    if (std::isinf(r)) continue;  // no t > +inf
    IndexSet ball = ball_members(F.X(), {x, r, BallKind::closed}, pol.tol_strict);
    bool hit = false;
    for (std::size_t z : ball)
      if (F.contains(z, 0, y)) {
        hit = true;
        break;
      }
    if (!hit) {
      // Smallest radius that would have worked, for the report.
      double need = kInf;
      for (std::size_t z = 0; z < F.X().size(); ++z)
        if (F.contains(z, 0, y)) need = std::min(need, F.X()(x, z));
      w.violation(x, y, need, r);
    }
  }
  return w.v;
}

// y in F(B(x, mu(delta)), 0) with the open ball: a strictly stronger form.
inline PairVerdict check_open_strong_on_W(const ParamSetValuedMap& F, const PairSet& W,
                                          const FunctionalModulus& mu,
                                          const NumericPolicy& pol) {
  detail::check_pairs(F, W);
  detail::WorstTracker w;
  for (auto [x, y] : W) {
    ++w.v.checked;
    double r = mu(delta(F, y, x));
    bool hit = false;
    if (std::isinf(r)) {
      for (std::size_t z = 0; z < F.X().size() && !hit; ++z) hit = F.contains(z, 0, y);
    } else {
      for (std::size_t z : ball_members(F.X(), {x, r, BallKind::open}, pol.tol_strict))
        if (F.contains(z, 0, y)) {
          hit = true;
          break;
        }
    }
    if (!hit) w.violation(x, y, kInf, r);
  }
  return w.v;
}

struct EquivalenceAudit {
  PairVerdict regular;
  PairVerdict open;
  PairVerdict strong;  // the (iii) form
  bool agree = true;                // regular <=> open
  bool implication_ok = true;       // strong => open
  bool strong_strictly_stronger = false;
};

inline EquivalenceAudit equivalence_audit(const ParamSetValuedMap& F, const PairSet& W,
                                          const FunctionalModulus& mu,
                                          const NumericPolicy& pol) {
  EquivalenceAudit a;
  a.regular = check_regular_on_W(F, W, mu, pol);
  a.open = check_open_on_W(F, W, mu, pol);
  a.strong = check_open_strong_on_W(F, W, mu, pol);
  a.agree = a.regular.holds == a.open.holds;
  a.implication_ok = !a.strong.holds || a.open.holds;
  a.strong_strictly_stronger = a.open.holds && !a.strong.holds;
  return a;
}

struct NuRegularity {
  PairVerdict verdict;
  PairSet reduced;  // W' = {(x,y) in W : mu(delta) < nu(x,y)}
};

// nu is aligned with W.
inline NuRegularity check_nu_regular_on_W(const ParamSetValuedMap& F, const PairSet& W,
                                          const FunctionalModulus& mu,
                                          const std::vector<double>& nu,
                                          const NumericPolicy& pol) {
  if (nu.size() != W.size()) raise(ErrorKind::size, "nu table does not match W");
  detail::check_pairs(F, W);
  NuRegularity r;
  for (std::size_t i = 0; i < W.size(); ++i) {
    if (!(nu[i] > 0)) raise(ErrorKind::domain, "nu must be positive", "/nu/" + std::to_string(i));
    auto [x, y] = W[i];
    if (lt_strict(mu(delta(F, y, x)), nu[i], pol.tol_strict)) r.reduced.push_back(W[i]);
  }
  r.verdict = check_regular_on_W(F, r.reduced, mu, pol);
  return r;
}

struct LocalRegularity {
  bool holds = false;  // some neighbourhoods larger than singletons certified
  std::string verdict;
  // Pareto frontier of certified closed-ball radii (r_U, r_V).
  std::vector<std::pair<double, double>> frontier;
  double r_U = 0;
  double r_V = 0;
};

namespace detail {

inline std::vector<double> distinct_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Pareto frontier of closed-ball radii (r_U, r_V) around (xbar, ybar) that
// avoid every violation. A violation (a, b) is caught by every box with
// r_U >= a and r_V >= b. rx, ry hold the distances of all points to the
// centres; radii range over those values.
inline LocalRegularity local_frontier(const std::vector<double>& rx,
                                      const std::vector<double>& ry,
                                      const std::vector<std::pair<double, double>>& violations) {
  std::vector<double> ux = distinct_sorted(rx), uy = distinct_sorted(ry);
  std::vector<double> bad_y(ux.size(), kInf);
  for (auto [a, b] : violations) {
    std::size_t i = static_cast<std::size_t>(std::lower_bound(ux.begin(), ux.end(), a) - ux.begin());
    if (i < ux.size()) bad_y[i] = std::min(bad_y[i], b);
  }
  LocalRegularity out;
  double prefix = kInf;
  double best_size = -1;
  for (std::size_t i = 0; i < ux.size(); ++i) {
    prefix = std::min(prefix, bad_y[i]);
    auto it = std::lower_bound(uy.begin(), uy.end(), prefix);
    if (it == uy.begin()) break;  // no y-radius survives
    double rv = *(it - 1);
    if (!out.frontier.empty() && out.frontier.back().second == rv) out.frontier.pop_back();
    out.frontier.emplace_back(ux[i], rv);
    double count_u = static_cast<double>(
        std::count_if(rx.begin(), rx.end(), [&](double r) { return r <= ux[i]; }));
    double count_v = static_cast<double>(
        std::count_if(ry.begin(), ry.end(), [&](double r) { return r <= rv; }));
    if (count_u * count_v > best_size) {
      best_size = count_u * count_v;
      out.r_U = ux[i];
      out.r_V = rv;
    }
  }
  double need_u = ux.size() > 1 ? ux[1] : 0.0;
  double need_v = uy.size() > 1 ? uy[1] : 0.0;
  for (auto [ru, rv] : out.frontier)
    if (ru >= need_u && rv >= need_v) out.holds = true;
  out.verdict = out.holds ? "holds" : "fails at resolution (only singleton neighbourhoods)";
  return out;
}

}  // namespace detail

// Largest product neighbourhoods B[xbar,r_U] x B[ybar,r_V] on which the
// regularity inequality holds.
inline LocalRegularity check_local_regularity(const ParamSetValuedMap& F, std::size_t xbar,
                                              std::size_t ybar, const FunctionalModulus& mu,
                                              const NumericPolicy& pol) {
  F.X().check_index(xbar);
  F.Y().check_index(ybar);
  if (!F.contains(xbar, 0, ybar))
    raise(ErrorKind::precondition, "(xbar, ybar) is not in the graph of F0");
  const auto& X = F.X();
  const auto& Y = F.Y();
  std::vector<double> rx, ry;
  for (std::size_t x = 0; x < X.size(); ++x) rx.push_back(X(xbar, x));
  for (std::size_t y = 0; y < Y.size(); ++y) ry.push_back(Y(ybar, y));
  std::vector<std::pair<double, double>> bad;
  for (std::size_t y = 0; y < Y.size(); ++y) {
    IndexSet zero = F.inverse(0, y);
    for (std::size_t x = 0; x < X.size(); ++x) {
      double lhs = point_set_distance(X, x, zero);
      if (!le_tol(lhs, mu(delta(F, y, x)), pol.tol_strict)) bad.emplace_back(rx[x], ry[y]);
    }
  }
  return detail::local_frontier(rx, ry, bad);
}

}  // namespace nlreg
