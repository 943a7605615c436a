#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "error.hpp"
#include "metric_space.hpp"
#include "numeric.hpp"

namespace nlreg {

struct EVPInstance {
  const FiniteMetricSpace* space = nullptr;
  std::vector<double> f;  // +inf allowed, not everywhere
  double epsilon = 1;
  double lambda = 1;
  std::size_t x0 = 0;

  double slope() const { return epsilon / lambda; }

  double inf_f() const {
    double m = kInf;
    for (double v : f) m = std::min(m, v);
    return m;
  }

  void validate(const NumericPolicy& pol) const {
    if (!space) raise(ErrorKind::schema, "instance has no space");
    if (f.size() != space->size())
      raise(ErrorKind::size, "f has " + std::to_string(f.size()) + " values for " +
                                 std::to_string(space->size()) + " points", "/f");
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::isnan(f[i]) || f[i] == -kInf)
        raise(ErrorKind::domain, "f must be real or +inf", "/f/" + std::to_string(i));
    if (!(epsilon > 0) || !std::isfinite(epsilon))
      raise(ErrorKind::domain, "epsilon must be positive", "/epsilon");
    if (!(lambda > 0) || !std::isfinite(lambda))
      raise(ErrorKind::domain, "lambda must be positive", "/lambda");
    space->check_index(x0);
    double m = inf_f();
    if (std::isinf(m)) raise(ErrorKind::precondition, "f is +inf everywhere", "/f");
    if (!lt_strict(f[x0], m + epsilon, pol.tol_strict))
      raise(ErrorKind::precondition,
            "f(x0) < inf f + epsilon fails: f(x0) = " + std::to_string(f[x0]) +
                ", inf f = " + std::to_string(m),
            "/x0");
  }
};

struct EVPStep {
  std::size_t x = 0;
  double a = 0;
};

struct EVPResult {
  std::size_t z = 0;
  std::vector<EVPStep> trace;
  double path_length = 0;  // sum d(x_n, x_{n+1})
};

namespace detail {

// sup_u f(x) - f(u) - c d(u,x), with its maximiser (smallest index on ties).
inline std::pair<double, std::size_t> evp_sup(const EVPInstance& in, std::size_t x) {
  const auto& X = *in.space;
  const double c = in.slope();
  double best = -kInf;
  std::size_t arg = x;
  for (std::size_t u = 0; u < X.size(); ++u) {
    if (std::isinf(in.f[u])) continue;
    double v = in.f[x] - in.f[u] - c * X(u, x);
    if (v > best) {
      best = v;
      arg = u;
    }
  }
  return {best, arg};
}

}  // namespace detail

// The construction from the proof: a_n by exhaustive sup, stop when a_n is
// below tolerance, otherwise move to the point of maximal perturbed decrease.
// That point meets the half-sup requirement with room to spare.
inline EVPResult evp_solve(const EVPInstance& in, const NumericPolicy& pol) {
  in.validate(pol);
  EVPResult r;
  std::size_t x = in.x0;
  const std::size_t cap = 2 * in.space->size() + 64;
  for (std::size_t n = 0;; ++n) {
    auto [a, arg] = detail::evp_sup(in, x);
    r.trace.push_back({x, a});
    if (a <= pol.tol_strict) break;
    if (n > cap) raise(ErrorKind::invariant, "Ekeland iteration failed to terminate");
    r.path_length += (*in.space)(x, arg);
    x = arg;
  }
  r.z = x;
  return r;
}

struct EVPVerdict {
  bool i = false, ii = false, iii = false;
  double distance = 0;       // d(z, x0)
  std::size_t worst_u = 0;   // u minimising f(u) + c d(u,z) - f(z)
  double worst_margin = kInf;
  bool all() const { return i && ii && iii; }
};

inline EVPVerdict evp_verify(const EVPInstance& in, std::size_t z, const NumericPolicy& pol) {
  in.validate(pol);
  in.space->check_index(z);
  const auto& X = *in.space;
  EVPVerdict v;
  v.distance = X(z, in.x0);
  v.i = lt_strict(v.distance, in.lambda, pol.tol_strict);
  v.ii = le_tol(in.f[z], in.f[in.x0], pol.tol_strict);
  if (std::isinf(in.f[z])) {
    v.iii = false;
    v.worst_margin = -kInf;
    return v;
  }
  const double c = in.slope();
  for (std::size_t u = 0; u < X.size(); ++u) {
    double m = in.f[u] + c * X(u, z) - in.f[z];
    if (m < v.worst_margin) {
      v.worst_margin = m;
      v.worst_u = u;
    }
  }
  v.iii = v.worst_margin >= -pol.tol_strict;
  return v;
}

// Every z meeting (i)-(iii). Condition (iii) can only fail at u with
// f(u) < f(z), so candidates are scanned against points sorted by f.
inline IndexSet evp_oracle(const EVPInstance& in, const NumericPolicy& pol) {
  in.validate(pol);
  const auto& X = *in.space;
  if (X.size() > pol.oracle_cap)
    raise(ErrorKind::size, "space of " + std::to_string(X.size()) +
                               " points exceeds the oracle cap of " +
                               std::to_string(pol.oracle_cap));
  std::vector<std::size_t> by_f(X.size());
  std::iota(by_f.begin(), by_f.end(), 0);
  std::stable_sort(by_f.begin(), by_f.end(),
                   [&](std::size_t a, std::size_t b) { return in.f[a] < in.f[b]; });
  const double c = in.slope();
  IndexSet out;
  for (std::size_t z = 0; z < X.size(); ++z) {
    if (std::isinf(in.f[z])) continue;
    if (!lt_strict(X(z, in.x0), in.lambda, pol.tol_strict)) continue;
    if (!le_tol(in.f[z], in.f[in.x0], pol.tol_strict)) continue;
    bool ok = true;
    for (std::size_t u : by_f) {
      if (in.f[u] >= in.f[z] - pol.tol_strict) break;
      if (in.f[u] + c * X(u, z) - in.f[z] < -pol.tol_strict) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(z);
  }
  return out;
}

// Trace properties from the proof: halving of a_n, monotone f, and the
// path-length bound (lambda/epsilon)(f(x0) - f(z)) < lambda.
struct EVPTraceAudit {
  bool halving = true;
  bool monotone = true;
  bool path_bound = true;
  bool length_bound = true;
  bool half_sup = true;  // each step gains at least a_n / 2
  double path_length = 0;
  bool all() const { return halving && monotone && path_bound && length_bound && half_sup; }
};

inline EVPTraceAudit evp_audit_trace(const EVPInstance& in, const EVPResult& r,
                                     const NumericPolicy& pol) {
  EVPTraceAudit a;
  const auto& X = *in.space;
  const double tol = pol.tol_strict;
  for (std::size_t n = 0; n + 1 < r.trace.size(); ++n) {
    const auto& s = r.trace[n];
    const auto& t = r.trace[n + 1];
    if (!le_tol(t.a, s.a / 2, tol)) a.halving = false;
    if (!le_tol(in.f[t.x], in.f[s.x], tol)) a.monotone = false;
    if (in.f[s.x] - in.f[t.x] - in.slope() * X(s.x, t.x) < s.a / 2 - tol) a.half_sup = false;
    a.path_length += X(s.x, t.x);
  }
  double bound = (in.f[in.x0] - in.f[r.z]) / in.slope();
  a.path_bound = le_tol(a.path_length, bound, tol * (1 + bound)) &&
                 lt_strict(a.path_length, in.lambda, tol);
  double a0 = r.trace.front().a;
  double limit = a0 > tol ? std::ceil(std::log2(a0 / tol)) + 1 : 1;
  a.length_bound = static_cast<double>(r.trace.size()) <= limit;
  return a;
}

}  // namespace nlreg
