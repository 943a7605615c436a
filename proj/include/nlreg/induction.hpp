#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "metric_space.hpp"
#include "numeric.hpp"
#include "svmap.hpp"

namespace nlreg {

// A positive sequence: geometric first * ratio^n, or an explicit table.
// Past the end of a table an a-sequence continues with zeros and a
// b-sequence is truncated.
struct SequenceSpec {
  enum class Kind { geometric, table };

  Kind kind = Kind::geometric;
  double first = 1;
  double ratio = 0.5;
  std::vector<double> table;

  static SequenceSpec geometric(double first, double ratio) {
    SequenceSpec s;
    s.kind = Kind::geometric;
    s.first = first;
    s.ratio = ratio;
    s.validate();
    return s;
  }

  static SequenceSpec explicit_table(std::vector<double> t) {
    SequenceSpec s;
    s.kind = Kind::table;
    s.table = std::move(t);
    s.validate();
    return s;
  }

  void validate() const {
    if (kind == Kind::geometric) {
      if (!(first > 0) || !std::isfinite(first))
        raise(ErrorKind::schema, "geometric sequence needs first > 0");
      if (!(ratio > 0 && ratio < 1))
        raise(ErrorKind::schema, "geometric ratio must lie in (0,1)");
    } else {
      if (table.empty()) raise(ErrorKind::schema, "explicit sequence table is empty");
      for (double v : table)
        if (!(v >= 0) || !std::isfinite(v))
          raise(ErrorKind::schema, "sequence entries must be finite and >= 0");
    }
  }

  double term(std::size_t n) const {
    if (kind == Kind::geometric) return first * std::pow(ratio, static_cast<double>(n));
    return n < table.size() ? table[n] : 0.0;
  }

  // sum_{i<n}
  double sum_before(std::size_t n) const {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
  }

  // sum_{i>=n}; closed form for geometric sequences.
  double tail_from(std::size_t n) const {
    if (kind == Kind::geometric)
      return first * std::pow(ratio, static_cast<double>(n)) / (1 - ratio);
    double s = 0;
    for (std::size_t i = n; i < table.size(); ++i) s += table[i];
    return s;
  }

  double total() const { return tail_from(0); }

  std::size_t length() const {
    return kind == Kind::table ? table.size() : static_cast<std::size_t>(-1);
  }
};

// One step n of the iteration: move from the fibre at a_n to the fibre at
// a_{n+1} with budget b_n. The step whose target lands on level 0 is
// terminal; it may spend the whole remaining budget sum_{i>=n} b_i, which is
// what the limit argument consumes below the ladder resolution.
struct ScheduleStep {
  std::size_t n = 0;
  double a_n = 0;
  std::size_t source = 0;  // ladder index of a_n
  double a_next = 0;
  std::size_t target = 0;  // ladder index of a_{n+1}
  bool snapped = false;    // a_{n+1} strictly between levels
  double budget = 0;
  bool terminal = false;
};

struct Schedule {
  std::vector<ScheduleStep> steps;
  bool reaches_zero = false;
  bool nonincreasing = true;
  double total_b = 0;
};

inline Schedule build_schedule(const TLadder& ladder, double t, const SequenceSpec& a,
                               const SequenceSpec& b, const NumericPolicy& pol) {
  Schedule s;
  s.total_b = b.total();
  std::size_t horizon = static_cast<std::size_t>(std::max(pol.horizon, 1));
  horizon = std::min(horizon, b.length());
  std::size_t source = ladder.require_index(t, pol.tol_strict);
  for (std::size_t n = 0; n < horizon; ++n) {
    ScheduleStep st;
    st.n = n;
    st.a_n = n == 0 ? t : a.term(n);
    st.source = source;
    st.a_next = a.term(n + 1);
    if (st.a_next > st.a_n + pol.tol_strict) s.nonincreasing = false;
    LevelSnap snap = ladder.snap(st.a_next, pol.tol_strict);
    st.target = snap.index;
    st.snapped = snap.snapped;
    st.terminal = snap.index == 0;
    st.budget = st.terminal ? b.tail_from(n) : b.term(n);
    s.steps.push_back(st);
    source = st.target;
    if (st.terminal) {
      s.reaches_zero = true;
      break;
    }
  }
  return s;
}

struct PreconditionReport {
  bool a4 = true;  // sum b_n < inf
  bool a2 = true;  // a_0 = t, a_n decreasing to 0 within the horizon
  bool a3 = true;  // covering step condition
  std::string a2_detail;
  double sum_b = 0;
  std::optional<std::size_t> a3_fail_n;
  std::optional<std::size_t> a3_witness;
  double a3_distance = 0;
  double a3_budget = 0;
  std::vector<std::size_t> vacuous_steps;
  std::vector<std::pair<std::size_t, double>> snaps;  // (n+1, a_{n+1}) snapped upward
  OscVerdict osc;  // informational: the terminal step is checked directly
  Schedule schedule;

  bool passes() const { return a4 && a2 && a3; }
};

namespace detail {

inline IndexSet restricted(const IndexSet& fibre, const std::optional<IndexSet>& U) {
  return U ? set_intersection(fibre, *U) : fibre;
}

inline void check_start(const Fibration& phi, double t, std::size_t x,
                        const std::optional<IndexSet>& U, const NumericPolicy& pol) {
  phi.space().check_index(x);
  std::size_t lt = phi.ladder.require_index(t, pol.tol_strict);
  if (!contains(phi.at(lt), x))
    raise(ErrorKind::precondition, "start point x is not in Phi(t)");
  if (U && !contains(*U, x))
    raise(ErrorKind::precondition, "start point x is outside the restricting set");
}

}  // namespace detail

inline PreconditionReport verify_preconditions(const Fibration& phi, double t, std::size_t x,
                                               const SequenceSpec& a, const SequenceSpec& b,
                                               const NumericPolicy& pol,
                                               const std::optional<IndexSet>& U = {}) {
  a.validate();
  b.validate();
  detail::check_start(phi, t, x, U, pol);
  PreconditionReport r;
  const auto& X = phi.space();
  r.schedule = build_schedule(phi.ladder, t, a, b, pol);
  r.sum_b = r.schedule.total_b;
  r.a4 = std::isfinite(r.sum_b);
  if (std::abs(a.term(0) - t) > pol.tol_strict) {
    r.a2 = false;
    r.a2_detail = "a_0 differs from t";
  } else if (!r.schedule.nonincreasing) {
    r.a2 = false;
    r.a2_detail = "a_n is not nonincreasing";
  } else if (!r.schedule.reaches_zero) {
    r.a2 = false;
    r.a2_detail = "a_n does not fall below the ladder resolution within the horizon";
  }
  if (phi.ladder.has_positive())
    r.osc = outer_semicontinuity_at_zero(phi, std::max(1, std::min<int>(pol.osc_resolution,
                                                            static_cast<int>(phi.ladder.size() - 1))),
                                         pol.tol_strict);

  double radius = 0;
  for (const ScheduleStep& st : r.schedule.steps) {
    if (st.snapped && !st.terminal) r.snaps.emplace_back(st.n + 1, st.a_next);
    IndexSet Un;
    if (st.n == 0) {
      Un = {x};
    } else {
      Un = ball_members(X, {x, radius, BallKind::open}, pol.tol_strict);
    }
    if (U) Un = set_intersection(Un, *U);
    IndexSet sources = set_intersection(phi.at(st.source), Un);
    if (sources.empty()) r.vacuous_steps.push_back(st.n);
    IndexSet targets = detail::restricted(phi.at(st.target), U);
    for (std::size_t u : sources) {
      double d = point_set_distance(X, u, targets);
      if (!lt_strict(d, st.budget, pol.tol_strict)) {
        r.a3 = false;
        r.a3_fail_n = st.n;
        r.a3_witness = u;
        r.a3_distance = d;
        r.a3_budget = st.budget;
        break;
      }
    }
    if (!r.a3) break;
    radius += b.term(st.n);
  }
  return r;
}

enum class TraceStatus { certified, precondition_failed, horizon_exhausted };

inline const char* to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::certified: return "certified";
    case TraceStatus::precondition_failed: return "precondition_failed";
    case TraceStatus::horizon_exhausted: return "horizon_exhausted";
  }
  return "?";
}

struct TraceStep {
  std::size_t n = 0;
  double a_n = 0;
  double level = 0;  // ladder value the fibre of a_{n+1} was read at
  std::size_t x_n = 0;
  double b_n = 0;    // budget actually used at this step
  std::size_t next = 0;
  std::size_t candidates = 0;
  bool snapped = false;
  bool terminal = false;
};

struct IterationTrace {
  std::vector<TraceStep> steps;
  std::optional<std::size_t> witness;
  double bound = 0;     // sum of all b_n (closed-form tail for geometric specs)
  double distance = kInf;  // d(x, z) when a witness exists
  TraceStatus status = TraceStatus::precondition_failed;
  std::string failed_condition;
  std::size_t failed_at = 0;
  std::string note;
};

// Executes the construction of the induction lemma. Each step picks
// x_{n+1} in Phi(a_{n+1}) with d(x_n, x_{n+1}) < b_n, preferring minimal
// distance then minimal index; dead ends are backtracked so the verdict is
// independent of the greedy choice. The final point must lie in Phi(0).
inline IterationTrace run_induction(const Fibration& phi, double t, std::size_t x,
                                    const SequenceSpec& a, const SequenceSpec& b,
                                    const NumericPolicy& pol,
                                    const std::optional<IndexSet>& U = {}) {
  a.validate();
  b.validate();
  detail::check_start(phi, t, x, U, pol);
  const auto& X = phi.space();
  Schedule sched = build_schedule(phi.ladder, t, a, b, pol);
  IterationTrace tr;
  tr.bound = sched.total_b;
  const std::size_t T = sched.steps.size();
  IndexSet zero = detail::restricted(phi.at(0), U);
  if (T == 0) {
    tr.status = TraceStatus::horizon_exhausted;
    tr.note = "empty schedule";
    return tr;
  }

  std::vector<IndexSet> targets(T);
  for (std::size_t n = 0; n < T; ++n)
    targets[n] = detail::restricted(phi.at(sched.steps[n].target), U);

  // dead[n][p]: no admissible continuation from p at step n.
  std::vector<std::vector<char>> dead(T, std::vector<char>(X.size(), 0));
  std::vector<TraceStep> path;
  std::size_t deepest = 0;

  auto candidates = [&](std::size_t n, std::size_t p) {
    std::vector<std::pair<double, std::size_t>> c;
    for (std::size_t q : targets[n]) {
      double d = X(p, q);
      if (lt_strict(d, sched.steps[n].budget, pol.tol_strict)) c.emplace_back(d, q);
    }
    std::sort(c.begin(), c.end());
    return c;
  };

  auto search = [&](auto&& self, std::size_t n, std::size_t p) -> bool {
    deepest = std::max(deepest, n);
    if (dead[n][p]) return false;
    const ScheduleStep& st = sched.steps[n];
    auto cand = candidates(n, p);
    for (auto [d, q] : cand) {
      if (n + 1 == T && !contains(zero, q)) continue;
      TraceStep ts{n, st.a_n, phi.ladder[st.target], p, st.budget, q, cand.size(),
                   st.snapped, st.terminal};
      path.push_back(ts);
      if (n + 1 == T || self(self, n + 1, q)) return true;
      path.pop_back();
    }
    dead[n][p] = 1;
    return false;
  };

  if (search(search, 0, x)) {
    tr.steps = path;
    tr.witness = path.back().next;
    tr.distance = X(x, *tr.witness);
    tr.status = TraceStatus::certified;
    if (!sched.reaches_zero) tr.note = "horizon reached inside Phi(0)";
    return tr;
  }

  // Report the greedy trace as far as it goes.
  std::size_t p = x;
  for (std::size_t n = 0; n < T; ++n) {
    auto cand = candidates(n, p);
    const ScheduleStep& st = sched.steps[n];
    if (cand.empty()) break;
    tr.steps.push_back({n, st.a_n, phi.ladder[st.target], p, st.budget, cand.front().second,
                        cand.size(), st.snapped, st.terminal});
    p = cand.front().second;
  }
  bool full_path = tr.steps.size() == T;
  if (!sched.reaches_zero && full_path) {
    tr.status = TraceStatus::horizon_exhausted;
    tr.failed_condition = "horizon";
    tr.failed_at = T;
    tr.note = "0-fibre missed at the horizon: outer semicontinuity violated at ladder resolution";
  } else {
    tr.status = TraceStatus::precondition_failed;
    tr.failed_condition = "A3";
    tr.failed_at = full_path ? T - 1 : std::min(deepest, tr.steps.size());
    if (full_path) tr.note = "last step does not reach Phi(0)";
  }
  return tr;
}

}  // namespace nlreg
