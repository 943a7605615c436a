#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "certificate.hpp"
#include "error.hpp"
#include "metric_space.hpp"
#include "modulus.hpp"
#include "numeric.hpp"
#include "regularity.hpp"
#include "svmap.hpp"

namespace nlreg {

enum class QueryMode { regular, open, holder, nu_regular, nu_open, nu_holder, at_point };

// Everything a conventional-setting check needs. W pairs are (x, y); nu is
// aligned with W when present. at_point uses (xbar, ybar) and sweeps
// closed-ball neighbourhoods.
struct RegularityQuery {
  const PlainSetValuedMap* map = nullptr;
  PairSet W;
  FunctionalModulus mu;
  std::optional<std::vector<double>> nu;
  QueryMode mode = QueryMode::regular;
  std::size_t xbar = 0;
  std::size_t ybar = 0;
};

struct ConvVerdict {
  bool holds = true;
  // (x, y) for regularity and openness; (x1, x2, y) for Hoelder.
  std::vector<std::size_t> witness;
  double lhs = 0;
  double rhs = 0;
  std::size_t checked = 0;
  std::size_t excluded = 0;  // pairs with d(y,F(x)) = +inf
  std::vector<std::string> warnings;
  std::optional<LocalRegularity> local;  // at_point mode
};

// d(y,F(x)) and d(x,F^-1(y)) for every pair, computed once.
class DistanceTables {
 public:
  explicit DistanceTables(const PlainSetValuedMap& F) : nx_(F.X().size()), ny_(F.Y().size()) {
    img_.assign(nx_ * ny_, kInf);
    pre_.assign(nx_ * ny_, kInf);
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y) {
        img_[x * ny_ + y] = F.image_distance(y, x);
        pre_[x * ny_ + y] = F.preimage_distance(x, y);
      }
  }
  double image(std::size_t x, std::size_t y) const { return img_[x * ny_ + y]; }
  double preimage(std::size_t x, std::size_t y) const { return pre_[x * ny_ + y]; }

 private:
  std::size_t nx_, ny_;
  std::vector<double> img_, pre_;
};

namespace detail {

struct ConvTracker {
  ConvVerdict v;
  double worst = -kInf;
  void violation(std::vector<std::size_t> w, double lhs, double rhs) {
    v.holds = false;
    double gap = lhs - rhs;
    if (std::isnan(gap)) gap = kInf;
    std::vector<std::size_t> key(w.rbegin(), w.rend());
    std::vector<std::size_t> cur(v.witness.rbegin(), v.witness.rend());
    if (v.witness.empty() || gap > worst || (gap == worst && key < cur)) {
      worst = gap;
      v.witness = std::move(w);
      v.lhs = lhs;
      v.rhs = rhs;
    }
  }
};

inline const PlainSetValuedMap& query_map(const RegularityQuery& q) {
  if (!q.map) raise(ErrorKind::schema, "query has no map");
  for (auto [x, y] : q.W) {
    q.map->X().check_index(x);
    q.map->Y().check_index(y);
  }
  if (q.nu && q.nu->size() != q.W.size()) raise(ErrorKind::size, "nu table does not match W");
  return *q.map;
}

inline bool is_nu_mode(QueryMode m) {
  return m == QueryMode::nu_regular || m == QueryMode::nu_open || m == QueryMode::nu_holder;
}

inline void require_at_point(const PlainSetValuedMap& F, const RegularityQuery& q) {
  F.X().check_index(q.xbar);
  F.Y().check_index(q.ybar);
  if (!F.contains(q.xbar, q.ybar))
    raise(ErrorKind::precondition, "(xbar, ybar) is not in the graph of F");
}

}  // namespace detail

// d(x,F^-1(y)) <= mu(d(y,F(x))). Pairs with d(y,F(x)) = +inf are excluded
// with a warning. nu-modes restrict W to mu(d(y,F(x))) < nu first.
inline ConvVerdict check_metric_regularity(const RegularityQuery& q, const NumericPolicy& pol,
                                           const DistanceTables* tables = nullptr) {
  const auto& F = detail::query_map(q);
  std::optional<DistanceTables> own;
  if (!tables) tables = &own.emplace(F);
  const auto& D = *tables;
  detail::ConvTracker t;
  if (q.mode == QueryMode::at_point) {
    detail::require_at_point(F, q);
    std::vector<double> rx, ry;
    for (std::size_t x = 0; x < F.X().size(); ++x) rx.push_back(F.X()(q.xbar, x));
    for (std::size_t y = 0; y < F.Y().size(); ++y) ry.push_back(F.Y()(q.ybar, y));
    std::vector<std::pair<double, double>> bad;
    for (std::size_t x = 0; x < F.X().size(); ++x)
      for (std::size_t y = 0; y < F.Y().size(); ++y) {
        double rhs = q.mu(D.image(x, y));
        if (!le_tol(D.preimage(x, y), rhs, pol.tol_strict)) bad.emplace_back(rx[x], ry[y]);
      }
    t.v.local = detail::local_frontier(rx, ry, bad);
    t.v.holds = t.v.local->holds;
    t.v.checked = F.X().size() * F.Y().size();
    return t.v;
  }
  for (std::size_t i = 0; i < q.W.size(); ++i) {
    auto [x, y] = q.W[i];
    double d = D.image(x, y);
    if (std::isinf(d)) {
      ++t.v.excluded;
      continue;
    }
    double rhs = q.mu(d);
    if (detail::is_nu_mode(q.mode) && q.nu && !lt_strict(rhs, (*q.nu)[i], pol.tol_strict))
      continue;
    ++t.v.checked;
    double lhs = D.preimage(x, y);
    if (!le_tol(lhs, rhs, pol.tol_strict)) t.violation({x, y}, lhs, rhs);
  }
  if (t.v.excluded)
    t.v.warnings.push_back(std::to_string(t.v.excluded) +
                           " pair(s) with empty F(x) excluded: inequality vacuous");
  return t.v;
}

// y in F(B(x,t)) for every t > mu(d(y,F(x))) (and t < nu in nu-mode). The
// quantifier is decided on the closed ball of radius mu(d(y,F(x))).
inline ConvVerdict check_openness(const RegularityQuery& q, const NumericPolicy& pol) {
  const auto& F = detail::query_map(q);
  const auto& X = F.X();
  detail::ConvTracker t;
  auto covered = [&](std::size_t x, std::size_t y, double r) {
    for (std::size_t z : ball_members(X, {x, r, BallKind::closed}, pol.tol_strict))
      if (F.contains(z, y)) return true;
    return false;
  };
  if (q.mode == QueryMode::at_point) {
    detail::require_at_point(F, q);
    std::vector<double> rx, ry;
    for (std::size_t x = 0; x < X.size(); ++x) rx.push_back(X(q.xbar, x));
    for (std::size_t y = 0; y < F.Y().size(); ++y) ry.push_back(F.Y()(q.ybar, y));
    std::vector<std::pair<double, double>> bad;
    for (std::size_t x = 0; x < X.size(); ++x)
      for (std::size_t y = 0; y < F.Y().size(); ++y) {
        double r = q.mu(F.image_distance(y, x));
        if (!std::isinf(r) && !covered(x, y, r)) bad.emplace_back(rx[x], ry[y]);
      }
    t.v.local = detail::local_frontier(rx, ry, bad);
    t.v.holds = t.v.local->holds;
    t.v.checked = X.size() * F.Y().size();
    return t.v;
  }
  for (std::size_t i = 0; i < q.W.size(); ++i) {
    auto [x, y] = q.W[i];
    double r = q.mu(F.image_distance(y, x));
    ++t.v.checked;
    if (std::isinf(r)) continue;
    if (detail::is_nu_mode(q.mode) && q.nu && !lt_strict(r, (*q.nu)[i], pol.tol_strict))
      continue;  // empty t-interval
    if (!covered(x, y, r)) t.violation({x, y}, F.preimage_distance(x, y), r);
  }
  return t.v;
}

// Hoelder property of the query map on W: d(y,F(x2)) <= mu(d(x1,x2)) for
// x1 in X, y in F(x1), (x2,y) in W. at_point uses U x U x (F(x1) cap V);
// strong_at_point lets x1 range over all of X.
inline ConvVerdict check_holder(const RegularityQuery& q, const NumericPolicy& pol,
                                bool strong_at_point = false) {
  const auto& F = detail::query_map(q);
  const auto& X = F.X();
  const auto& Y = F.Y();
  detail::ConvTracker t;
  if (q.mode == QueryMode::at_point) {
    detail::require_at_point(F, q);
    std::vector<double> rx, ry;
    for (std::size_t x = 0; x < X.size(); ++x) rx.push_back(X(q.xbar, x));
    for (std::size_t y = 0; y < Y.size(); ++y) ry.push_back(Y(q.ybar, y));
    std::vector<std::pair<double, double>> bad;
    for (std::size_t x1 = 0; x1 < X.size(); ++x1)
      for (std::size_t y : F.image(x1))
        for (std::size_t x2 = 0; x2 < X.size(); ++x2) {
          double lhs = F.image_distance(y, x2);
          if (le_tol(lhs, q.mu(X(x1, x2)), pol.tol_strict)) continue;
          double need_u = strong_at_point ? rx[x2] : std::max(rx[x1], rx[x2]);
          bad.emplace_back(need_u, ry[y]);
        }
    t.v.local = detail::local_frontier(rx, ry, bad);
    t.v.holds = t.v.local->holds;
    return t.v;
  }
  for (std::size_t i = 0; i < q.W.size(); ++i) {
    auto [x2, y] = q.W[i];
    double lhs = F.image_distance(y, x2);
    for (std::size_t x1 : F.preimage(y)) {
      double rhs = q.mu(X(x1, x2));
      if (detail::is_nu_mode(q.mode) && q.nu && !lt_strict(rhs, (*q.nu)[i], pol.tol_strict))
        continue;
      ++t.v.checked;
      if (!le_tol(lhs, rhs, pol.tol_strict)) t.violation({x1, x2, y}, lhs, rhs);
    }
  }
  return t.v;
}

inline PairSet transpose(const PairSet& W) {
  PairSet out;
  out.reserve(W.size());
  for (auto [x, y] : W) out.emplace_back(y, x);
  return out;
}

struct T61Audit {
  ConvVerdict regular, open, inverse_holder;
  bool agree = true;
  // Point form, when requested.
  std::optional<ConvVerdict> regular_at, open_at, strong_holder_at, weak_holder_at;
  bool point_agree = true;           // regular = open = strong Hoelder at the point
  bool weak_implied = true;          // regular at the point => weak Hoelder
  bool weak_equivalence_checked = false;
  bool weak_agree = true;
  std::string part_iii;
};

// Regularity, openness and the Hoelder property of the inverse on the
// transposed set must give the same verdict. With a point given, also audits
// the local forms; the weak Hoelder form is only one-directional unless mu
// is strictly increasing.
inline T61Audit equivalence_audit_T61(const PlainSetValuedMap& F, const PairSet& W,
                                      const FunctionalModulus& mu, const NumericPolicy& pol,
                                      std::optional<std::pair<std::size_t, std::size_t>> point = {},
                                      const std::optional<std::vector<double>>& nu = {}) {
  T61Audit a;
  PlainSetValuedMap Finv = F.inverse();
  QueryMode rm = nu ? QueryMode::nu_regular : QueryMode::regular;
  QueryMode om = nu ? QueryMode::nu_open : QueryMode::open;
  QueryMode hm = nu ? QueryMode::nu_holder : QueryMode::holder;
  RegularityQuery qr{&F, W, mu, nu, rm, 0, 0};
  RegularityQuery qo{&F, W, mu, nu, om, 0, 0};
  RegularityQuery qh{&Finv, transpose(W), mu, nu, hm, 0, 0};
  a.regular = check_metric_regularity(qr, pol);
  a.open = check_openness(qo, pol);
  a.inverse_holder = check_holder(qh, pol);
  a.agree = a.regular.holds == a.open.holds && a.open.holds == a.inverse_holder.holds;

  if (point) {
    auto [xb, yb] = *point;
    RegularityQuery pr{&F, {}, mu, {}, QueryMode::at_point, xb, yb};
    RegularityQuery ph{&Finv, {}, mu, {}, QueryMode::at_point, yb, xb};
    a.regular_at = check_metric_regularity(pr, pol);
    a.open_at = check_openness(pr, pol);
    a.strong_holder_at = check_holder(ph, pol, true);
    a.weak_holder_at = check_holder(ph, pol, false);
    // The inverse's frontier is in (r_V, r_U) order.
    auto swapped = [](std::vector<std::pair<double, double>> f) {
      for (auto& p : f) std::swap(p.first, p.second);
      std::sort(f.begin(), f.end());
      return f;
    };
    auto sorted = [](std::vector<std::pair<double, double>> f) {
      std::sort(f.begin(), f.end());
      return f;
    };
    a.point_agree = a.regular_at->holds == a.open_at->holds &&
                    a.open_at->holds == a.strong_holder_at->holds &&
                    sorted(a.regular_at->local->frontier) == sorted(a.open_at->local->frontier) &&
                    sorted(a.regular_at->local->frontier) ==
                        swapped(a.strong_holder_at->local->frontier);
    a.weak_implied = !a.regular_at->holds || a.weak_holder_at->holds;
    if (mu.strictly_increasing()) {
      a.weak_equivalence_checked = true;
      a.weak_agree = a.regular_at->holds == a.weak_holder_at->holds;
      a.part_iii = a.weak_agree ? "weak Hoelder form agrees at resolution"
                                : "weak Hoelder form disagrees at resolution";
    } else {
      a.part_iii = "one-directional only (mu not strictly increasing)";
    }
  }
  return a;
}

// Decrease criterion in metric terms. For each (x,y) in W and u with
// d(y,F(u)) > 0 and mu(d(y,F(u))) + d(u,x) <= mu(d(y,F(x))), some u' != u
// must satisfy mu(d(y,F(u'))) <= mu(d(y,F(u))) - d(u,u').
inline Certificate certify_T64(const PlainSetValuedMap& F, const PairSet& W,
                               const FunctionalModulus& mu, const NumericPolicy& pol) {
  require_decrease_modulus(mu);
  Certificate cert;
  cert.criterion = "T64";
  cert.notes.push_back("upper semicontinuity of F: automatic on a finite space");
  const auto& X = F.X();
  DistanceTables D(F);
  RegularityQuery q{&F, W, mu, {}, QueryMode::regular, 0, 0};
  detail::query_map(q);

  auto& dec = cert.add("decrease", true, "an improving u' exists for every u in the region");
  std::size_t region = 0;
  std::vector<std::optional<std::vector<double>>> muy(F.Y().size());
  for (auto [x, y] : W) {
    if (!muy[y]) {
      muy[y].emplace(X.size());
      for (std::size_t u = 0; u < X.size(); ++u) (*muy[y])[u] = mu(D.image(u, y));
    }
    const auto& m = *muy[y];
    for (std::size_t u = 0; u < X.size() && dec.pass; ++u) {
      if (!(D.image(u, y) > 0)) continue;
      if (!le_tol(m[u] + X(u, x), m[x], pol.tol_strict)) continue;
      ++region;
      bool found = false;
      for (std::size_t v = 0; v < X.size() && !found; ++v)
        if (v != u && m[v] <= m[u] - X(u, v)) found = true;
      if (!found) {
        dec.pass = false;
        dec.data["x"] = static_cast<double>(x);
        dec.data["y"] = static_cast<double>(y);
        dec.data["u"] = static_cast<double>(u);
      }
    }
    if (!dec.pass) break;
  }
  dec.data["region_points"] = static_cast<double>(region);

  ConvVerdict reg = check_metric_regularity(q, pol, &D);
  cert.target = "metric regularity on W";
  cert.target_value = reg.holds ? 0.0 : reg.lhs;
  cert.bound = reg.holds ? 0.0 : reg.rhs;
  cert.strict = false;
  cert.confirmation = reg.holds;
  cert.vacuous = W.empty();
  for (const auto& w : reg.warnings) cert.notes.push_back(w);
  return cert;
}

struct ModulusRow {
  std::size_t x = 0, y = 0;
  double lhs = 0;   // d(x,F^-1(y))
  double base = 0;  // d(y,F(x))^k
  double ratio = 0;
};

struct ModulusFit {
  double lambda = 0;  // lambda* ; +inf when no power modulus works
  double k = 1;
  std::optional<std::pair<std::size_t, std::size_t>> argmax;
  std::vector<ModulusRow> rows;
  std::size_t excluded = 0;

  std::string csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "x,y,lhs,rhs_base,ratio\n";
    for (const auto& r : rows) os << r.x << ',' << r.y << ',' << r.lhs << ',' << r.base << ',' << r.ratio << '\n';
    return os.str();
  }
};

// Smallest lambda with d(x,F^-1(y)) <= lambda d(y,F(x))^k on W.
inline ModulusFit estimate_best_modulus(const PlainSetValuedMap& F, const PairSet& W, double k,
                                        const NumericPolicy& pol) {
  (void)pol;
  if (W.empty()) raise(ErrorKind::domain, "modulus fit needs a nonempty W");
  if (!(k > 0)) raise(ErrorKind::domain, "power exponent must be > 0");
  RegularityQuery q{&F, W, FunctionalModulus::linear(1), {}, QueryMode::regular, 0, 0};
  detail::query_map(q);
  ModulusFit fit;
  fit.k = k;
  double best = -1;
  for (auto [x, y] : W) {
    double d = F.image_distance(y, x);
    if (std::isinf(d)) {
      ++fit.excluded;
      continue;
    }
    ModulusRow r{x, y, F.preimage_distance(x, y), std::pow(d, k), 0};
    if (r.lhs == 0) r.ratio = 0;
    else if (r.base == 0 || std::isinf(r.lhs)) r.ratio = kInf;
    else r.ratio = r.lhs / r.base;
    if (r.ratio > best) {
      best = r.ratio;
      fit.argmax = std::make_pair(x, y);
    }
    fit.rows.push_back(r);
  }
  fit.lambda = std::max(best, 0.0);
  return fit;
}

}  // namespace nlreg
