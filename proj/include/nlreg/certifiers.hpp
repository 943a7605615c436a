#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "certificate.hpp"
#include "error.hpp"
#include "induction.hpp"
#include "metric_space.hpp"
#include "modulus.hpp"
#include "numeric.hpp"
#include "svmap.hpp"

namespace nlreg {

// How an explicit sequence of a scheme depends on the starting level t.
enum class SeqScale { absolute, times_t, times_mu_t };

struct ScaledSequence {
  SequenceSpec seq;
  SeqScale scale = SeqScale::absolute;

  SequenceSpec at(double t, const FunctionalModulus* mu) const {
    double s = 1;
    if (scale == SeqScale::times_t) s = t;
    if (scale == SeqScale::times_mu_t) {
      if (!mu) raise(ErrorKind::schema, "sequence scaled by mu(t) but no modulus given");
      s = (*mu)(t);
    }
    if (!(s > 0) || !std::isfinite(s))
      raise(ErrorKind::domain, "sequence scale factor must be finite and > 0");
    SequenceSpec out = seq;
    if (out.kind == SequenceSpec::Kind::geometric) {
      out.first *= s;
    } else {
      for (double& v : out.table) v *= s;
    }
    return out;
  }
};

// Auxiliary data of the covering criteria. b and m drive the functional
// schemes; bn and cn are the explicit sequences of the sequential scheme.
struct AuxScheme {
  ScalarFunction b = ScalarFunction::linear(0.5);
  ScalarFunction m = ScalarFunction::linear(1.0);
  std::optional<ScaledSequence> bn;
  std::optional<ScaledSequence> cn;
};

namespace detail {

inline std::size_t require_graph_point(const ParamSetValuedMap& F, std::size_t x, double t,
                                       std::size_t y, const NumericPolicy& pol) {
  F.X().check_index(x);
  F.Y().check_index(y);
  if (!(t > 0)) raise(ErrorKind::precondition, "criterion needs t > 0");
  std::size_t lt = F.ladder().require_index(t, pol.tol_strict);
  if (!F.contains(x, lt, y))
    raise(ErrorKind::precondition, "(x,t,y) is not in the graph of F");
  return lt;
}

inline double zero_fibre_distance(const ParamSetValuedMap& F, std::size_t x, std::size_t y) {
  return point_set_distance(F.X(), x, F.inverse(0, y));
}

inline void confirm(Certificate& c, double value, double bound, bool strict,
                    const NumericPolicy& pol) {
  c.target = "d(x,F0^-1(y))";
  c.target_value = value;
  c.bound = bound;
  c.strict = strict;
  c.confirmation = strict ? lt_strict(value, bound, pol.tol_strict)
                          : le_tol(value, bound, pol.tol_strict);
}

inline void note_osc(Certificate& c, const Fibration& phi, const NumericPolicy& pol) {
  if (!phi.ladder.has_positive()) return;
  int K = std::max(1, std::min<int>(pol.osc_resolution,
                                    static_cast<int>(phi.ladder.size() - 1)));
  OscVerdict v = outer_semicontinuity_at_zero(phi, K, pol.tol_strict);
  c.notes.push_back(std::string("outer semicontinuity at 0 at resolution: ") +
                    (v.holds ? "holds" : "fails at z=" + std::to_string(*v.witness)) +
                    " (informational; the terminal step is checked directly)");
}

// The b-orbit tau_n = b^n(t) cut at the first value that falls below the
// ladder resolution. levels[n] is the ladder index tau_n is read at.
struct Orbit {
  std::vector<double> tau;
  std::vector<std::size_t> levels;
  std::vector<bool> snapped;
  bool reaches_zero = false;
  bool nonincreasing = true;
  std::string error;
};

inline Orbit b_orbit(const ScalarFunction& b, double t, const TLadder& ladder,
                     const NumericPolicy& pol) {
  Orbit o;
  o.tau.push_back(t);
  o.levels.push_back(ladder.require_index(t, pol.tol_strict));
  o.snapped.push_back(false);
  for (int n = 0; n < pol.horizon; ++n) {
    double next = b(o.tau.back());
    if (!(next >= 0) || !std::isfinite(next)) {
      o.error = "b(tau) is not a finite nonnegative number";
      return o;
    }
    if (next > o.tau.back() + pol.tol_strict) o.nonincreasing = false;
    LevelSnap s;
    try {
      s = ladder.snap(next, pol.tol_strict);
    } catch (const Error& e) {
      o.error = e.what();
      return o;
    }
    o.tau.push_back(next);
    o.levels.push_back(s.index);
    o.snapped.push_back(s.snapped);
    if (s.index == 0) {
      o.reaches_zero = true;
      return o;
    }
  }
  return o;
}

// mu along the orbit, either the given modulus or the smallest one
// compatible with mu(tau) >= m(tau) + mu(b(tau)), i.e. suffix sums of
// m(b^n(t)) continued past the ladder resolution.
inline std::vector<double> orbit_mu(const Orbit& o, const ScalarFunction& b,
                                    const ScalarFunction& m, const FunctionalModulus* mu) {
  std::vector<double> out(o.tau.size());
  if (mu) {
    for (std::size_t i = 0; i < o.tau.size(); ++i) out[i] = (*mu)(o.tau[i]);
    return out;
  }
  std::vector<double> tail_terms;
  double tau = o.tau.back();
  for (int k = 0; k < 100000; ++k) {
    double v = m(tau);
    tail_terms.push_back(v);
    if (!std::isfinite(v)) break;
    if (v == 0 || (k > 8 && v < 1e-17 * tail_terms.front())) break;
    tau = b(tau);
    if (k == 99999) tail_terms.push_back(kInf);  // no convergence in reach
  }
  double tail = 0;
  for (auto it = tail_terms.rbegin(); it != tail_terms.rend(); ++it) tail = *it + tail;
  out.back() = tail;
  for (std::size_t i = o.tau.size() - 1; i-- > 0;) out[i] = m(o.tau[i]) + out[i + 1];
  return out;
}

// mutau+: m(tau) -> 0 forces tau -> 0. Read non-vacuously: m must tend to 0
// at 0 and stay positive away from 0.
inline bool mutau_plus(const ScalarFunction& m) {
  return m.nondecreasing() && m.tends_to_zero() && m.positive_off_zero();
}

inline IndexSet ball_or_empty(const FiniteMetricSpace& X, std::size_t c, double r,
                              BallKind kind, double tol) {
  if (r < 0) return {};
  return ball_members(X, {c, r, kind}, tol);
}

}  // namespace detail

// Sequential covering scheme: a_0 = t, a_n = m(c_n), budgets b_n.
inline Certificate certify_khanh_plus(const ParamSetValuedMap& F, std::size_t x, double t,
                                      std::size_t y, const AuxScheme& scheme,
                                      const NumericPolicy& pol,
                                      const FunctionalModulus* mu = nullptr) {
  detail::require_graph_point(F, x, t, y, pol);
  if (!scheme.bn || !scheme.cn)
    raise(ErrorKind::schema, "sequential scheme needs explicit b_n and c_n");
  Certificate cert;
  cert.criterion = "khanh+";
  Fibration phi = F.fibration(y);
  SequenceSpec b = scheme.bn->at(t, mu);
  SequenceSpec c = scheme.cn->at(t, mu);

  std::size_t H = static_cast<std::size_t>(std::max(pol.horizon, 1)) + 1;
  std::vector<double> a{t};
  bool c_dec = true;
  for (std::size_t n = 1; n <= H; ++n) {
    a.push_back(scheme.m(c.term(n)));
    if (n > 1 && c.term(n) > c.term(n - 1) + pol.tol_strict) c_dec = false;
  }
  auto& b3 = cert.add("B3", c_dec, "sequential form: c_n decreasing to 0, m(c_n) decreasing to 0");
  cert.notes.push_back("B3 stronger form m(tau)->0 as tau->0: not verified");
  auto& a4 = cert.add("A4", std::isfinite(b.total()), "sum b_n finite");
  a4.data["sum_b"] = b.total();

  PreconditionReport rep;
  bool resolved = true;
  try {
    rep = verify_preconditions(phi, t, x, SequenceSpec::explicit_table(a), b, pol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::resolution) throw;
    resolved = false;
    cert.notes.push_back(e.what());
  }
  if (!resolved) {
    b3.pass = false;
    b3.detail = "m(c_n) cannot be placed on the ladder";
  } else {
    if (!rep.a2) {
      b3.pass = false;
      b3.detail += "; " + rep.a2_detail;
    }
    bool first_ok = !(rep.a3_fail_n && *rep.a3_fail_n == 0);
    auto& b4 = cert.add("B4+", first_ok, "d(x, F^-1_{m(c1)}(y)) < b_0");
    auto& b5 = cert.add("B5+", rep.a3 || !first_ok, "covering steps n >= 1");
    if (!rep.a3) {
      auto& h = first_ok ? b5 : b4;
      h.data["n"] = static_cast<double>(*rep.a3_fail_n);
      h.data["u"] = static_cast<double>(*rep.a3_witness);
      h.data["distance"] = rep.a3_distance;
      h.data["budget"] = rep.a3_budget;
    }
    for (std::size_t n : rep.vacuous_steps)
      cert.notes.push_back("vacuous step n=" + std::to_string(n));
    if (rep.passes()) {
      IterationTrace tr = run_induction(phi, t, x, SequenceSpec::explicit_table(a), b, pol);
      if (tr.witness)
        cert.notes.push_back("engine witness z=" + std::to_string(*tr.witness));
    }
  }
  detail::note_osc(cert, phi, pol);
  detail::confirm(cert, detail::zero_fibre_distance(F, x, y), b.total(), true, pol);
  return cert;
}

namespace detail {

struct FunctionalSetup {
  Orbit orbit;
  std::vector<double> mu;
  Fibration phi;
};

inline FunctionalSetup functional_hypotheses(Certificate& cert, const ParamSetValuedMap& F,
                                             double t, std::size_t y, const AuxScheme& s,
                                             const FunctionalModulus* mu,
                                             const NumericPolicy& pol) {
  FunctionalSetup fs;
  fs.phi = F.fibration(y);
  if (mu) validate_modulus(*mu);
  cert.add("mutau+", mutau_plus(s.m), "m tends to 0 only as tau tends to 0 (m: " +
                                           s.m.describe() + ")");
  fs.orbit = b_orbit(s.b, t, F.ladder(), pol);
  auto& a2 = cert.add("A2", fs.orbit.error.empty() && fs.orbit.reaches_zero &&
                                fs.orbit.nonincreasing,
                      "b^n(t) decreases below the ladder resolution within the horizon");
  if (!fs.orbit.error.empty()) a2.detail += "; " + fs.orbit.error;
  a2.data["orbit_length"] = static_cast<double>(fs.orbit.tau.size());
  fs.mu = orbit_mu(fs.orbit, s.b, s.m, mu);
  if (!mu) cert.notes.push_back("mu: canonical sum of m(b^n(tau)) along the orbit");

  // mu++ along the orbit (sufficient by the orbit-only relaxation).
  auto& mpp = cert.add("mu++", true, "mu(tau) >= m(tau) + mu(b(tau)) on the orbit");
  double worst = kInf;
  for (std::size_t n = 0; n + 1 < fs.orbit.tau.size(); ++n) {
    double gap = fs.mu[n] - (s.m(fs.orbit.tau[n]) + fs.mu[n + 1]);
    if (std::isnan(gap)) gap = 0;  // inf - inf: both sides infinite
    if (gap < worst) {
      worst = gap;
      mpp.data["n"] = static_cast<double>(n);
    }
    if (gap < 0) mpp.pass = false;
  }
  mpp.data["min_gap"] = worst;
  return fs;
}

}  // namespace detail

inline Certificate certify_khanh4_plus(const ParamSetValuedMap& F, std::size_t x, double t,
                                       std::size_t y, const AuxScheme& scheme,
                                       const FunctionalModulus* mu, const NumericPolicy& pol) {
  detail::require_graph_point(F, x, t, y, pol);
  Certificate cert;
  cert.criterion = "khanh4+";
  auto fs = detail::functional_hypotheses(cert, F, t, y, scheme, mu, pol);
  const auto& X = F.X();
  const auto& o = fs.orbit;
  double mu_t = fs.mu.front();

  auto& net = cert.add("net+++", true, "d(u, F^-1_{b(tau)}(y)) < m(tau) on the orbit");
  for (std::size_t n = 0; n + 1 < o.tau.size() && net.pass; ++n) {
    double radius = n == 0 ? 0.0 : mu_t - fs.mu[n];
    IndexSet region = set_intersection(fs.phi.at(o.levels[n]),
                                       detail::ball_or_empty(X, x, radius, BallKind::open,
                                                             pol.tol_strict));
    if (region.empty()) cert.notes.push_back("vacuous step n=" + std::to_string(n));
    const IndexSet& target = fs.phi.at(o.levels[n + 1]);
    double budget = scheme.m(o.tau[n]);
    for (std::size_t u : region) {
      double d = point_set_distance(X, u, target);
      if (!lt_strict(d, budget, pol.tol_strict)) {
        net.pass = false;
        net.data["n"] = static_cast<double>(n);
        net.data["u"] = static_cast<double>(u);
        net.data["distance"] = d;
        net.data["budget"] = budget;
        break;
      }
    }
  }
  if (cert.hypotheses_pass()) {
    std::vector<double> bn;
    for (std::size_t n = 0; n + 1 < o.tau.size(); ++n) bn.push_back(scheme.m(o.tau[n]));
    NumericPolicy p2 = pol;
    p2.horizon = std::max<int>(pol.horizon, static_cast<int>(bn.size()));
    IterationTrace tr = run_induction(fs.phi, t, x, SequenceSpec::explicit_table(o.tau),
                                      SequenceSpec::explicit_table(bn), p2);
    if (tr.witness) cert.notes.push_back("engine witness z=" + std::to_string(*tr.witness));
  }
  detail::note_osc(cert, fs.phi, pol);
  detail::confirm(cert, detail::zero_fibre_distance(F, x, y), mu_t, true, pol);
  return cert;
}

// Image-space form: set1 and set2 in place of net+++; net+++ is re-derived
// from them step by step and the intermediate points z are logged.
inline Certificate certify_image_space(const ParamSetValuedMap& F, std::size_t x, double t,
                                       std::size_t y, const AuxScheme& scheme,
                                       const FunctionalModulus* mu, const NumericPolicy& pol) {
  detail::require_graph_point(F, x, t, y, pol);
  Certificate cert;
  cert.criterion = "image";
  auto fs = detail::functional_hypotheses(cert, F, t, y, scheme, mu, pol);
  const auto& X = F.X();
  const auto& Y = F.Y();
  const auto& o = fs.orbit;
  double mu_t = fs.mu.front();

  // set1 at every level the orbit is read at.
  auto& s1 = cert.add("set1", true, "F0^-1(B(y,tau)) within F_tau^-1(y)");
  std::vector<std::size_t> lv = o.levels;
  std::sort(lv.begin(), lv.end());
  lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
  for (std::size_t k : lv) {
    if (k == 0) continue;
    IndexSet ball = ball_members(Y, {y, F.ladder()[k], BallKind::open}, pol.tol_strict);
    IndexSet pre;
    for (std::size_t v : ball) {
      IndexSet p = F.inverse(0, v);
      pre.insert(pre.end(), p.begin(), p.end());
    }
    pre = normalized(std::move(pre));
    IndexSet bad = set_difference(pre, fs.phi.at(k));
    if (!bad.empty()) {
      s1.pass = false;
      s1.data["level"] = F.ladder()[k];
      s1.data["x_prime"] = static_cast<double>(bad.front());
      break;
    }
  }

  auto& s2 = cert.add("set2", true, "d(y, F0(B(u, m(tau)))) < b(tau) on the orbit");
  auto& der = cert.add("net+++ (derived)", true, "z from set2 lies in F^-1_{b(tau)}(y)");
  std::size_t logged = 0;
  for (std::size_t n = 0; n + 1 < o.tau.size() && s2.pass; ++n) {
    double radius = n == 0 ? 0.0 : mu_t - fs.mu[n];
    IndexSet region = set_intersection(fs.phi.at(o.levels[n]),
                                       detail::ball_or_empty(X, x, radius, BallKind::open,
                                                             pol.tol_strict));
    bool terminal = o.levels[n + 1] == 0;
    // Below the resolution the y-ball degenerates to {y}.
    double r = terminal ? 0.0 : std::min(o.tau[n + 1], F.ladder()[o.levels[n + 1]]);
    IndexSet yball = ball_members(Y, {y, r, BallKind::open}, pol.tol_strict);
    double m_tau = scheme.m(o.tau[n]);
    for (std::size_t u : region) {
      IndexSet near = ball_members(X, {u, m_tau, BallKind::open}, pol.tol_strict);
      std::optional<std::size_t> z;
      for (std::size_t cand : near) {
        for (std::size_t v : yball)
          if (F.contains(cand, 0, v)) {
            z = cand;
            break;
          }
        if (z) break;
      }
      if (!z) {
        s2.pass = false;
        s2.data["n"] = static_cast<double>(n);
        s2.data["u"] = static_cast<double>(u);
        break;
      }
      if (!contains(fs.phi.at(o.levels[n + 1]), *z) ||
          !lt_strict(X(u, *z), m_tau, pol.tol_strict)) {
        der.pass = false;
        der.data["n"] = static_cast<double>(n);
        der.data["z"] = static_cast<double>(*z);
      }
      if (logged < 8) {
        cert.notes.push_back("n=" + std::to_string(n) + " u=" + std::to_string(u) +
                             " z=" + std::to_string(*z));
        ++logged;
      }
    }
  }
  detail::note_osc(cert, fs.phi, pol);
  detail::confirm(cert, detail::zero_fibre_distance(F, x, y), mu_t, true, pol);
  return cert;
}

// Decrease criterion: every (u,tau) in the region admits (u',tau') with
// mu(tau') <= mu(tau) - d(u',u). The decrease inequality is compared exactly.
inline Certificate certify_decrease(const ParamSetValuedMap& F, std::size_t x, double t,
                                    std::size_t y, const FunctionalModulus& mu,
                                    const NumericPolicy& pol) {
  require_decrease_modulus(mu);
  detail::require_graph_point(F, x, t, y, pol);
  Certificate cert;
  cert.criterion = "decrease";
  const auto& X = F.X();
  const auto& L = F.ladder();
  Fibration phi = F.fibration(y);
  double mu_t = mu(t);

  // Smallest mu over the levels each point belongs to.
  std::vector<double> best(X.size(), kInf);
  for (std::size_t k = 0; k < L.size(); ++k)
    for (std::size_t u : phi.at(k)) best[u] = std::min(best[u], mu(L[k]));

  auto& dec = cert.add("decrease", true, "(u',tau') exists for every (u,tau) in the region");
  std::size_t region_size = 0;
  for (std::size_t k = 1; k < L.size() && dec.pass; ++k) {
    if (L[k] > t + pol.tol_strict) break;
    double mk = mu(L[k]);
    for (std::size_t u : phi.at(k)) {
      if (!le_tol(X(x, u), mu_t - mk, pol.tol_strict)) continue;
      ++region_size;
      // (u, 0) itself continues the construction from a point of F0^-1(y).
      if (contains(phi.at(0), u)) continue;
      bool found = false;
      for (std::size_t v = 0; v < X.size() && !found; ++v)
        if (v != u && best[v] <= mk - X(v, u)) found = true;
      if (!found) {
        dec.pass = false;
        dec.data["u"] = static_cast<double>(u);
        dec.data["tau"] = L[k];
        break;
      }
    }
  }
  dec.data["region_pairs"] = static_cast<double>(region_size);

  if (dec.pass) {
    // Descent chain: repeatedly take the admissible u' of smallest mu.
    std::size_t u = x;
    double level_mu = mu_t;
    std::string chain = std::to_string(u);
    for (std::size_t step = 0; step <= X.size() * L.size() && level_mu > 0; ++step) {
      std::optional<std::size_t> next;
      for (std::size_t v = 0; v < X.size(); ++v)
        if (v != u && best[v] <= level_mu - X(v, u) && (!next || best[v] < best[*next]))
          next = v;
      if (!next) break;
      u = *next;
      level_mu = best[u];
      chain += "->" + std::to_string(u);
    }
    cert.notes.push_back("descent chain " + chain);
  }
  cert.notes.push_back("outer semicontinuity on [0,t): automatic for finite fibres");
  detail::confirm(cert, detail::zero_fibre_distance(F, x, y), mu_t, false, pol);
  return cert;
}

enum class FreeTCriterion { khanh_plus, khanh4_plus, image, decrease };

inline const char* to_string(FreeTCriterion c) {
  switch (c) {
    case FreeTCriterion::khanh_plus: return "khanh+";
    case FreeTCriterion::khanh4_plus: return "khanh4+";
    case FreeTCriterion::image: return "image";
    case FreeTCriterion::decrease: return "decrease";
  }
  return "?";
}

// Free-t wrapper: the per-t criterion is run at every ladder t >= delta with
// (x,t,y) in the graph. The existential "some gamma > delta" is resolved by
// the smallest gamma on the ladder, so the certificate rests on t = delta;
// the sweep also reports the largest gamma the criterion survives to.
inline Certificate free_t_estimate(const ParamSetValuedMap& F, std::size_t x, std::size_t y,
                                   FreeTCriterion which, const AuxScheme& scheme,
                                   const FunctionalModulus& mu, const NumericPolicy& pol) {
  validate_modulus(mu);
  Certificate cert;
  cert.criterion = std::string("free-t/") + to_string(which);
  auto dl = delta_level(F, y, x);
  double dist = detail::zero_fibre_distance(F, x, y);
  if (!dl) {
    cert.vacuous = true;
    cert.notes.push_back("delta = +inf: conclusion holds trivially");
    detail::confirm(cert, dist, kInf, false, pol);
    return cert;
  }
  const auto& L = F.ladder();
  double delta_v = L[*dl];
  auto per_t = [&](double t) {
    switch (which) {
      case FreeTCriterion::khanh_plus: {
        Certificate c = certify_khanh_plus(F, x, t, y, scheme, pol, &mu);
        SequenceSpec b = scheme.bn->at(t, &mu);
        c.add("A4-", le_tol(b.total(), mu(t), pol.tol_strict), "sum b_n <= mu(t)")
            .data["sum_b"] = b.total();
        return c;
      }
      case FreeTCriterion::khanh4_plus: return certify_khanh4_plus(F, x, t, y, scheme, &mu, pol);
      case FreeTCriterion::image: return certify_image_space(F, x, t, y, scheme, &mu, pol);
      case FreeTCriterion::decrease: return certify_decrease(F, x, t, y, mu, pol);
    }
    return Certificate{};
  };

  Certificate first = per_t(delta_v);
  auto& h = cert.add("per-t at delta", first.hypotheses_pass(),
                     "criterion hypotheses at t = delta (gamma just above delta)");
  h.data["delta"] = delta_v;
  for (const auto& sub : first.hypotheses)
    if (!sub.pass) h.detail += "; failed " + sub.id;
  double gamma_min = *dl + 1 < L.size() ? L[*dl + 1] : kInf;
  double gamma_max = kInf;
  if (first.hypotheses_pass()) {
    for (std::size_t k = *dl + 1; k < L.size(); ++k) {
      if (!F.contains(x, k, y)) continue;
      if (!per_t(L[k]).hypotheses_pass()) {
        gamma_max = L[k];
        break;
      }
    }
  } else {
    gamma_max = delta_v;
  }
  h.data["gamma_min"] = gamma_min;
  h.data["gamma_max"] = gamma_max;
  detail::confirm(cert, dist, mu(delta_v), false, pol);
  return cert;
}

}  // namespace nlreg
