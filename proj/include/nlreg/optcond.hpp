#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "lp.hpp"
#include "modulus.hpp"
#include "numeric.hpp"
#include "polyhedral.hpp"

namespace nlreg {

// Problem data on R^n (X), R^p (Y), R^q (Z), R^r (W). Q is open; it is held
// through its closure. All norms in this module are the max-norm so every
// distance is a linear program.
struct OptInstance {
  std::size_t n = 0, p = 0, q = 0, r = 0;
  Polyhedron S, C, D, Q;
  Polyhedron F_graph, G_graph, H_graph;  // in R^{n+p}, R^{n+q}, R^{n+r}
  Vec xbar, ybar, zbar;
  double tol = 1e-9;

  Polyhedron negD() const {
    Polyhedron P = D;
    for (auto& row : P.A)
      for (double& v : row) v = -v;
    return P;
  }

  void validate() const {
    auto dim = [](const Polyhedron& P, std::size_t d, const char* where) {
      if (P.dim != d)
        raise(ErrorKind::size, "expected dimension " + std::to_string(d) + ", got " +
                                   std::to_string(P.dim), where);
    };
    dim(S, n, "/S");
    dim(C, p, "/C");
    dim(Q, p, "/Q");
    dim(D, q, "/D");
    dim(F_graph, n + p, "/F_graph");
    dim(G_graph, n + q, "/G_graph");
    dim(H_graph, n + r, "/H_graph");
    if (xbar.size() != n || ybar.size() != p || zbar.size() != q)
      raise(ErrorKind::size, "base triple has the wrong dimensions", "/base");
    if (!C.is_cone()) raise(ErrorKind::invariant, "must be a cone (b = 0)", "/C");
    if (!D.is_cone()) raise(ErrorKind::invariant, "must be a cone (b = 0)", "/D");
    if (!Q.is_cone()) raise(ErrorKind::invariant, "must be a cone (b = 0)", "/Q");
    if (C.rows() == 0) raise(ErrorKind::invariant, "C is the whole space, not proper", "/C");
    if (Q.rows() == 0) raise(ErrorKind::invariant, "Q is the whole space, not proper", "/Q");
    if (!(Q.chebyshev_point().second > tol))
      raise(ErrorKind::invariant, "Q has empty interior", "/Q");
    if (!(D.chebyshev_point().second > tol))
      raise(ErrorKind::invariant, "D has empty interior", "/D");
    if (!S.contains(xbar, tol)) raise(ErrorKind::precondition, "xbar is not in S", "/base/0");
    if (!F_graph.contains(cat(xbar, ybar), tol))
      raise(ErrorKind::precondition, "ybar is not in F(xbar)", "/base/1");
    if (!G_graph.contains(cat(xbar, zbar), tol))
      raise(ErrorKind::precondition, "zbar is not in G(xbar)", "/base/2");
    if (!negD().contains(zbar, tol)) raise(ErrorKind::precondition, "zbar is not in -D", "/base/2");
    if (!H_graph.contains(cat(xbar, Vec(r, 0.0)), tol))
      raise(ErrorKind::precondition, "0 is not in H(xbar)", "/H_graph");
  }

  static Vec cat(const Vec& a, const Vec& b) {
    Vec out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }

  // gph(E + K) lifted as (x, y, y0, k) with (x, y0) in gph E, k in K,
  // y = y0 + k. Visible part (x, y).
  static Lifted plus_cone(const Polyhedron& graph, const Polyhedron& K, std::size_t n, std::size_t m) {
    const std::size_t dim = n + 3 * m;
    Mat A;
    Vec b;
    for (std::size_t i = 0; i < graph.rows(); ++i) {
      Vec a(dim, 0.0);
      for (std::size_t j = 0; j < n; ++j) a[j] = graph.A[i][j];
      for (std::size_t j = 0; j < m; ++j) a[n + m + j] = graph.A[i][n + j];
      A.push_back(a);
      b.push_back(graph.b[i]);
    }
    for (std::size_t i = 0; i < K.rows(); ++i) {
      Vec a(dim, 0.0);
      for (std::size_t j = 0; j < m; ++j) a[n + 2 * m + j] = K.A[i][j];
      A.push_back(a);
      b.push_back(0.0);
    }
    for (std::size_t j = 0; j < m; ++j)
      for (double s : {1.0, -1.0}) {
        Vec a(dim, 0.0);
        a[n + j] = s;
        a[n + m + j] = -s;
        a[n + 2 * m + j] = -s;
        A.push_back(a);
        b.push_back(0.0);
      }
    return {Polyhedron::make(dim, A, b), n + m};
  }

  Lifted Fplus() const { return plus_cone(F_graph, Q, n, p); }
  Lifted Gplus() const { return plus_cone(G_graph, D, n, q); }
  Lifted Hlift() const { return {H_graph, n + r}; }

  Vec Fplus_base() const { return cat(cat(cat(xbar, ybar), ybar), Vec(p, 0.0)); }
  Vec Gplus_base() const { return cat(cat(cat(xbar, zbar), zbar), Vec(q, 0.0)); }
  Vec H_base() const { return cat(xbar, Vec(r, 0.0)); }
};

struct CriticalTriple {
  Vec u, v, k;
};

struct Multipliers {
  Vec v, k, w;
  Vec flat() const { return OptInstance::cat(OptInstance::cat(v, k), w); }
};

struct Sampler {
  std::size_t count = 64;          // samples of IT2(S, xbar, u)
  std::uint64_t seed = 0;
  std::size_t direction_budget = 362;
  int gamma_levels = 20;
};

// First- and second-order tangent data at the base point.
struct FirstOrder {
  Polyhedron TS;   // T(S, xbar)
  Lifted TF, TG, TH;
  Polyhedron TnegD;  // T(-D, zbar)
};

inline FirstOrder first_order(const OptInstance& in) {
  FirstOrder f;
  f.TS = tangent_cone(in.S, in.xbar, in.tol).T;
  f.TF = in.Fplus().tangent_at(in.Fplus_base(), in.tol);
  f.TG = in.Gplus().tangent_at(in.Gplus_base(), in.tol);
  f.TH = in.Hlift().tangent_at(in.H_base(), in.tol);
  f.TnegD = tangent_cone(in.negD(), in.zbar, in.tol).T;
  return f;
}

struct SecondOrder {
  bool u_in_TS = true;      // otherwise IT2(S, xbar, u) is empty
  Polyhedron S2;            // T2(S, xbar, u), closure of IT2
  Polyhedron IT2S;
  Lifted F2, G2, H2;        // lifted cones in (x, value, hidden)
  Polyhedron A2negD;        // A2(-D, zbar, k)
};

inline SecondOrder second_order(const OptInstance& in, const FirstOrder& f, const CriticalTriple& t) {
  SecondOrder s;
  s.u_in_TS = f.TS.contains(t.u, in.tol);
  if (s.u_in_TS) {
    auto so = second_order_sets(in.S, in.xbar, t.u, in.tol);
    s.S2 = so.T2;
    s.IT2S = so.IT2;
  }
  s.F2 = lifted_second_order(f.TF, OptInstance::cat(t.u, t.v), in.tol);
  s.G2 = lifted_second_order(f.TG, OptInstance::cat(t.u, t.k), in.tol);
  s.H2 = lifted_second_order(f.TH, OptInstance::cat(t.u, Vec(in.r, 0.0)), in.tol);
  s.A2negD = second_order_sets(in.negD(), in.zbar, t.k, in.tol).A2;
  return s;
}

// Is (u, v, k) a critical direction? Memberships decided by LP.
inline bool is_critical(const OptInstance& in, const FirstOrder& f, const CriticalTriple& t) {
  const double tol = in.tol;
  if (t.u.size() != in.n || t.v.size() != in.p || t.k.size() != in.q) return false;
  if (!f.TH.contains(OptInstance::cat(t.u, Vec(in.r, 0.0)), tol)) return false;
  if (!f.TF.contains(OptInstance::cat(t.u, t.v), tol)) return false;
  Vec mv(t.v.size());
  for (std::size_t i = 0; i < mv.size(); ++i) mv[i] = -t.v[i];
  if (!in.Q.contains(mv, tol) || in.Q.violation(mv) < -tol) return false;  // -v in bd Q
  if (!f.TG.contains(OptInstance::cat(t.u, t.k), tol)) return false;
  return f.TnegD.contains(t.k, tol);
}

namespace detail {

inline Mat null_space(Mat A, std::size_t n, double tol = 1e-10) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < A.size(); ++col) {
    std::size_t best = row;
    for (std::size_t i = row; i < A.size(); ++i)
      if (std::abs(A[i][col]) > std::abs(A[best][col])) best = i;
    if (std::abs(A[best][col]) <= tol) continue;
    std::swap(A[row], A[best]);
    double pv = A[row][col];
    for (double& v : A[row]) v /= pv;
    for (std::size_t i = 0; i < A.size(); ++i)
      if (i != row && A[i][col] != 0) {
        double fct = A[i][col];
        for (std::size_t j = 0; j < n; ++j) A[i][j] -= fct * A[row][j];
      }
    pivots.push_back(col);
    ++row;
  }
  Mat basis;
  for (std::size_t fcol = 0; fcol < n; ++fcol) {
    if (std::find(pivots.begin(), pivots.end(), fcol) != pivots.end()) continue;
    Vec v(n, 0.0);
    v[fcol] = 1.0;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -A[i][fcol];
    basis.push_back(v);
  }
  return basis;
}

inline Vec unit(Vec v) {
  double s = norm_inf(v);
  if (s > 0)
    for (double& x : v) x /= s;
  return v;
}

// Normalised grid directions of {-m..m}^n within the budget, then the
// extreme rays of a pointed cone given by its rows.
inline Mat candidate_directions(std::size_t n, std::size_t budget, const Polyhedron& cone) {
  Mat out;
  out.push_back(Vec(n, 0.0));
  if (n == 0) return out;
  std::size_t m = 1;
  auto count = [n](std::size_t mm) {
    double c = std::pow(2.0 * static_cast<double>(mm) + 1.0, static_cast<double>(n)) - 1.0;
    return c;
  };
  while (count(m + 1) <= static_cast<double>(budget)) ++m;
  if (count(m) <= static_cast<double>(budget) * 4) {
    std::vector<long> idx(n, -static_cast<long>(m));
    for (;;) {
      bool zero = std::all_of(idx.begin(), idx.end(), [](long v) { return v == 0; });
      if (!zero) {
        Vec v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(idx[i]);
        out.push_back(unit(v));
      }
      std::size_t i = 0;
      while (i < n && idx[i] == static_cast<long>(m)) idx[i++] = -static_cast<long>(m);
      if (i == n) break;
      ++idx[i];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (double s : {1.0, -1.0}) {
        Vec v(n, 0.0);
        v[i] = s;
        out.push_back(v);
      }
  }
  // Extreme rays: one-dimensional solutions of n-1 active rows.
  const std::size_t R = cone.rows();
  if (n >= 2 && R >= n - 1 && R <= 12) {
    std::vector<std::size_t> pick(n - 1);
    for (std::size_t i = 0; i < n - 1; ++i) pick[i] = i;
    for (;;) {
      Mat sub;
      for (std::size_t i : pick) sub.push_back(cone.A[i]);
      Mat ns = null_space(sub, n);
      if (ns.size() == 1)
        for (double s : {1.0, -1.0}) {
          Vec v = ns[0];
          for (double& x : v) x *= s;
          v = unit(v);
          if (cone.contains(v, 1e-9)) out.push_back(v);
        }
      std::size_t i = n - 1;
      while (i > 0 && pick[i - 1] == R - (n - 1) + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < n - 1; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  // Drop repeats, keeping first occurrences.
  Mat uniq;
  for (auto& v : out) {
    bool seen = false;
    for (auto& w : uniq) {
      double dmax = 0;
      for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(v[i] - w[i]));
      if (dmax <= 1e-12) {
        seen = true;
        break;
      }
    }
    if (!seen) uniq.push_back(v);
  }
  return uniq;
}

// Value vector in a lifted cone slice: (x, value, hidden) in L with x fixed;
// extra rows restrict the value. Minimises the max-norm of the value.
inline std::optional<Vec> slice_point(const Lifted& L, const Vec& x, std::size_t m,
                                      const Mat& extra_le, const Mat& extra_eq, double tol) {
  const std::size_t N = L.P.dim;
  LinearProgram lp(N + 1);
  const std::size_t t = N;
  lp.c[t] = -1.0;
  for (std::size_t j = 0; j < x.size(); ++j) lp.add_sparse({{j, 1.0}}, Sense::eq, x[j]);
  L.P.constrain(lp, 0);
  const std::size_t off = x.size();
  for (const auto& row : extra_le) {
    Vec a(N + 1, 0.0);
    for (std::size_t j = 0; j < m; ++j) a[off + j] = row[j];
    lp.add_row(std::move(a), Sense::le, 0.0);
  }
  for (const auto& row : extra_eq) {
    Vec a(N + 1, 0.0);
    for (std::size_t j = 0; j < m; ++j) a[off + j] = row[j];
    lp.add_row(std::move(a), Sense::eq, 0.0);
  }
  for (std::size_t j = 0; j < m; ++j) {
    lp.add_sparse({{off + j, 1.0}, {t, -1.0}}, Sense::le, 0.0);
    lp.add_sparse({{off + j, -1.0}, {t, -1.0}}, Sense::le, 0.0);
  }
  LPResult r = solve_lp(lp);
  if (r.status != LPStatus::optimal || lp_violation(lp, r.x) > tol * 10) return std::nullopt;
  return Vec(r.x.begin() + static_cast<std::ptrdiff_t>(off),
             r.x.begin() + static_cast<std::ptrdiff_t>(off + m));
}

}  // namespace detail

// Candidate u from a direction grid and the extreme rays of T(S, xbar); for
// each, a v on -bd Q (one facet at a time) and a k in T(-D, zbar), both of
// smallest max-norm. Returned triples are re-verified.
inline std::vector<CriticalTriple> critical_directions(const OptInstance& in, const Sampler& smp) {
  in.validate();
  FirstOrder f = first_order(in);
  const double tol = in.tol;
  std::vector<CriticalTriple> out;
  Polyhedron negQ = in.Q;
  for (auto& row : negQ.A)
    for (double& v : row) v = -v;
  for (const Vec& u : detail::candidate_directions(in.n, smp.direction_budget, f.TS)) {
    if (!f.TH.contains(OptInstance::cat(u, Vec(in.r, 0.0)), tol)) continue;
    std::optional<Vec> v;
    for (std::size_t facet = 0; facet < negQ.rows() && !v; ++facet)
      v = detail::slice_point(f.TF, u, in.p, negQ.A, {negQ.A[facet]}, tol);
    if (!v) continue;
    auto k = detail::slice_point(f.TG, u, in.q, f.TnegD.A, {}, tol);
    if (!k) continue;
    CriticalTriple t{u, *v, *k};
    if (is_critical(in, f, t)) out.push_back(std::move(t));
  }
  return out;
}

namespace detail {

// Cone {xi : M xi <= 0} assembled from blocks placed on shared variables.
struct JointCone {
  std::size_t width = 0;
  Mat M;

  std::vector<std::size_t> alloc(std::size_t k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = width++;
    return idx;
  }

  // P's column j goes to variable cols[j]. P must be a cone.
  void place(const Polyhedron& P, const std::vector<std::size_t>& cols) {
    for (const auto& row : P.A) {
      std::vector<std::pair<std::size_t, double>> terms;
      for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] != 0) terms.emplace_back(cols[j], row[j]);
      pending.push_back(std::move(terms));
    }
  }

  Mat dense() const {
    Mat out;
    for (const auto& terms : pending) {
      Vec a(width, 0.0);
      for (auto [j, v] : terms) a[j] += v;
      out.push_back(std::move(a));
    }
    return out;
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> pending;
};

inline std::vector<std::size_t> concat(std::initializer_list<std::vector<std::size_t>> parts) {
  std::vector<std::size_t> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// LP over (m, lambda >= 0, extras) encoding "the functional c(m) is
// nonnegative on {M xi <= 0}": M^T lambda + c = 0, column by column.
// c_terms[j] lists (index into m, coefficient) for column j of M.
struct DualSystem {
  LinearProgram lp;
  std::size_t m0 = 0, msize = 0;
};

inline DualSystem dual_system(std::size_t msize, const Mat& M, std::size_t width,
                              const std::vector<std::vector<std::pair<std::size_t, double>>>& c_terms,
                              bool vacuous) {
  DualSystem d;
  d.msize = msize;
  d.lp = LinearProgram(msize);
  if (vacuous) return d;
  std::vector<std::size_t> lam(M.size());
  for (auto& l : lam) l = d.lp.add_var(true);
  for (std::size_t j = 0; j < width; ++j) {
    std::vector<std::pair<std::size_t, double>> terms = c_terms[j];
    for (std::size_t i = 0; i < M.size(); ++i)
      if (M[i][j] != 0) terms.emplace_back(lam[i], M[i][j]);
    d.lp.add_sparse(terms, Sense::eq, 0.0);
  }
  return d;
}

// Nonneg combination of generators equals the m-block slice [from, from+len).
inline void add_cone_membership(LinearProgram& lp, const Mat& gens, std::size_t from, std::size_t len,
                                double sign = 1.0) {
  std::vector<std::size_t> coef;
  for (std::size_t g = 0; g < gens.size(); ++g) coef.push_back(lp.add_var(true));
  for (std::size_t j = 0; j < len; ++j) {
    std::vector<std::pair<std::size_t, double>> terms{{from + j, 1.0}};
    for (std::size_t g = 0; g < gens.size(); ++g)
      if (gens[g][j] != 0) terms.emplace_back(coef[g], -sign * gens[g][j]);
    lp.add_sparse(terms, Sense::eq, 0.0);
  }
}

// Tries s * m_i = 1, |m_j| <= 1 over i and s in order; returns the first
// feasible m, rescaled to unit l1 norm.
inline std::optional<Vec> solve_normalised(const LinearProgram& base, std::size_t msize) {
  for (std::size_t i = 0; i < msize; ++i)
    for (double s : {1.0, -1.0}) {
      LinearProgram lp = base;
      for (std::size_t j = 0; j < msize; ++j) {
        lp.add_sparse({{j, 1.0}}, Sense::le, 1.0);
        lp.add_sparse({{j, 1.0}}, Sense::ge, -1.0);
      }
      lp.add_sparse({{i, s}}, Sense::eq, 1.0);
      LPResult r = solve_lp(lp, 1e-9, false);
      if (r.status != LPStatus::optimal) continue;
      if (lp_violation(lp, r.x) > 1e-7) continue;
      Vec m(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(msize));
      double l1 = norm1(m);
      for (double& v : m) v /= l1;
      return m;
    }
  return std::nullopt;
}

}  // namespace detail

struct MultiplierSearch {
  std::optional<Multipliers> mult;
  bool vacuous = false;            // IT2(S, xbar, u) empty
  std::string interior_hypothesis; // "plausible at resolution" or the unmet hypothesis
  std::string note;
};

// Joint second-order cone over (x, y, yh, z, zh, w): x in T2(S), (x, y) in
// the F+ set, (x, z) in the G+ set, (x, w) in the H set.
struct JointLayout {
  detail::JointCone J;
  std::vector<std::size_t> x, y, yh, z, zh, w;
};

inline JointLayout joint_layout(const OptInstance& in, const SecondOrder& s) {
  JointLayout L;
  L.x = L.J.alloc(in.n);
  L.y = L.J.alloc(in.p);
  L.yh = L.J.alloc(s.F2.hidden());
  L.z = L.J.alloc(in.q);
  L.zh = L.J.alloc(s.G2.hidden());
  L.w = L.J.alloc(in.r);
  L.J.place(s.S2, L.x);
  L.J.place(s.F2.P, detail::concat({L.x, L.y, L.yh}));
  L.J.place(s.G2.P, detail::concat({L.x, L.z, L.zh}));
  L.J.place(s.H2.P, detail::concat({L.x, L.w}));
  return L;
}

namespace detail {

// Sampled rank of the (y, z, w) image of the joint cone: random objectives
// over the cone cut by the unit box.
inline std::size_t image_rank(const OptInstance& in, const JointLayout& L, std::uint64_t seed) {
  Mat M = L.J.dense();
  std::vector<std::size_t> out = concat({L.y, L.z, L.w});
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::normal_distribution<double> N(0.0, 1.0);
  Mat pts;
  const std::size_t tries = 2 * out.size() + 8;
  for (std::size_t k = 0; k < tries; ++k) {
    LinearProgram lp(L.J.width);
    for (const auto& row : M) lp.add_row(row, Sense::le, 0.0);
    for (std::size_t j = 0; j < L.J.width; ++j) {
      lp.add_sparse({{j, 1.0}}, Sense::le, 1.0);
      lp.add_sparse({{j, 1.0}}, Sense::ge, -1.0);
    }
    for (std::size_t j : out) lp.c[j] = N(rng);
    LPResult r = solve_lp(lp, 1e-9, false);
    if (r.status != LPStatus::optimal) continue;
    Vec p;
    for (std::size_t j : out) p.push_back(r.x[j]);
    pts.push_back(p);
  }
  (void)in;
  if (pts.empty() || out.empty()) return 0;
  return out.size() - null_space(pts, out.size(), 1e-7).size();
}

}  // namespace detail

// Multipliers of the second-order rule at a critical triple. The rule over
// all x in IT2(S) and all elements of the derivative sets is imposed exactly
// through its dual description on the closed joint cone.
inline MultiplierSearch find_multipliers(const OptInstance& in, const CriticalTriple& t,
                                         const Sampler& smp) {
  in.validate();
  FirstOrder f = first_order(in);
  if (!is_critical(in, f, t)) raise(ErrorKind::precondition, "triple is not a critical direction");
  SecondOrder s = second_order(in, f, t);
  MultiplierSearch res;
  res.vacuous = !s.u_in_TS;
  const std::size_t P = in.p, Qd = in.q, R = in.r, msize = P + Qd + R;

  Mat M;
  std::size_t width = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> c_terms;
  if (!res.vacuous) {
    JointLayout L = joint_layout(in, s);
    M = L.J.dense();
    width = L.J.width;
    c_terms.assign(width, {});
    for (std::size_t i = 0; i < P; ++i) c_terms[L.y[i]].emplace_back(i, 1.0);
    for (std::size_t i = 0; i < Qd; ++i) c_terms[L.z[i]].emplace_back(P + i, 1.0);
    for (std::size_t i = 0; i < R; ++i) c_terms[L.w[i]].emplace_back(P + Qd + i, 1.0);
    std::size_t rank = detail::image_rank(in, L, smp.seed);
    res.interior_hypothesis = rank == msize
                                  ? "plausible at resolution"
                                  : "unmet at resolution: image of IT2(S) spans " +
                                        std::to_string(rank) + " of " + std::to_string(msize) +
                                        " dimensions";
  } else {
    res.interior_hypothesis = "vacuous: u is outside T(S, xbar)";
  }
  detail::DualSystem d = detail::dual_system(msize, M, width, c_terms, res.vacuous);
  // v* in Q* = cone{-rows of Q}; k* in N(-D, zbar) = cone{active rows of -D}.
  Mat qgen;
  for (const auto& row : in.Q.A) {
    Vec g(row.size());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = -row[j];
    qgen.push_back(g);
  }
  detail::add_cone_membership(d.lp, qgen, 0, P);
  detail::add_cone_membership(d.lp, tangent_cone(in.negD(), in.zbar, in.tol).normal_generators, P, Qd);
  {
    std::vector<std::pair<std::size_t, double>> tv, tk;
    for (std::size_t i = 0; i < P; ++i) tv.emplace_back(i, t.v[i]);
    for (std::size_t i = 0; i < Qd; ++i) tk.emplace_back(P + i, t.k[i]);
    if (P) d.lp.add_sparse(tv, Sense::eq, 0.0);
    if (Qd) d.lp.add_sparse(tk, Sense::eq, 0.0);
  }
  auto m = detail::solve_normalised(d.lp, msize);
  if (!m) {
    res.note = "no multiplier found at resolution; this does not refute the rule";
    return res;
  }
  Multipliers out;
  out.v.assign(m->begin(), m->begin() + static_cast<std::ptrdiff_t>(P));
  out.k.assign(m->begin() + static_cast<std::ptrdiff_t>(P), m->begin() + static_cast<std::ptrdiff_t>(P + Qd));
  out.w.assign(m->begin() + static_cast<std::ptrdiff_t>(P + Qd), m->end());
  res.mult = std::move(out);
  return res;
}

namespace detail {

// Is vec in cone{gens}, up to tol in the max-norm residual?
inline bool in_generated_cone(const Mat& gens, const Vec& vec, double tol) {
  const std::size_t n = vec.size();
  LinearProgram lp(1);
  lp.c[0] = -1.0;
  std::vector<std::size_t> coef;
  for (std::size_t g = 0; g < gens.size(); ++g) coef.push_back(lp.add_var(true));
  for (std::size_t j = 0; j < n; ++j)
    for (double s : {1.0, -1.0}) {
      std::vector<std::pair<std::size_t, double>> terms{{0, -1.0}};
      for (std::size_t g = 0; g < gens.size(); ++g) terms.emplace_back(coef[g], -s * gens[g][j]);
      lp.add_sparse(terms, Sense::le, -s * vec[j]);
    }
  LPResult r = solve_lp(lp, 1e-12, false);
  return r.status == LPStatus::optimal && -r.value <= tol * (1 + norm_inf(vec));
}

// inf of <c, value> over the slice of a lifted cone at x; +inf when empty.
inline double slice_min(const Lifted& L, const Vec& x, const Vec& c) {
  const std::size_t N = L.P.dim;
  LinearProgram lp(N);
  for (std::size_t j = 0; j < x.size(); ++j) lp.add_sparse({{j, 1.0}}, Sense::eq, x[j]);
  L.P.constrain(lp, 0);
  for (std::size_t j = 0; j < c.size(); ++j) lp.c[x.size() + j] = -c[j];
  LPResult r = solve_lp(lp, 1e-9, false);
  if (r.status == LPStatus::infeasible) return kInf;
  if (r.status == LPStatus::unbounded) return -kInf;
  return -r.value;
}

}  // namespace detail

struct MultiplierVerdict {
  bool holds = true;
  double rhs = 0;            // sup over A2(-D, zbar, k) of <k*, d>
  double margin = kInf;      // min over samples of lhs - rhs
  std::optional<Vec> worst_x;
  std::size_t samples = 0;   // sampled x in IT2(S, xbar, u)
  std::size_t vacuous_samples = 0;  // some derivative set empty at x
  std::string note;
};

// Checks the rule on a fresh sample of IT2(S, xbar, u). Inner infima over the
// three derivative sets are exact LPs.
inline MultiplierVerdict check_multiplier_rule(const OptInstance& in, const CriticalTriple& t,
                                               const Multipliers& m, const Sampler& smp) {
  in.validate();
  const double tol = in.tol;
  if (m.v.size() != in.p || m.k.size() != in.q || m.w.size() != in.r)
    raise(ErrorKind::size, "multipliers have the wrong dimensions");
  if (norm_inf(m.flat()) <= tol) raise(ErrorKind::precondition, "multipliers are all zero");
  if (std::abs(dot(m.v, t.v)) > tol) raise(ErrorKind::precondition, "<v*, v> != 0");
  if (std::abs(dot(m.k, t.k)) > tol) raise(ErrorKind::precondition, "<k*, k> != 0");
  Mat qgen;
  for (const auto& row : in.Q.A) {
    Vec g(row.size());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = -row[j];
    qgen.push_back(g);
  }
  if (!detail::in_generated_cone(qgen, m.v, tol)) raise(ErrorKind::precondition, "v* is not in Q*");
  if (!detail::in_generated_cone(tangent_cone(in.negD(), in.zbar, tol).normal_generators, m.k, tol))
    raise(ErrorKind::precondition, "k* is not in N(-D, zbar)");
  FirstOrder f = first_order(in);
  if (!is_critical(in, f, t)) raise(ErrorKind::precondition, "triple is not a critical direction");
  SecondOrder s = second_order(in, f, t);

  MultiplierVerdict v;
  {
    LinearProgram lp(in.q);
    s.A2negD.constrain(lp, 0);
    lp.c = m.k;
    LPResult r = solve_lp(lp, 1e-9, false);
    v.rhs = r.status == LPStatus::infeasible ? -kInf
            : r.status == LPStatus::unbounded ? kInf
                                              : r.value;
  }
  if (!s.u_in_TS) {
    v.note = "IT2(S, xbar, u) is empty: rule holds vacuously";
    return v;
  }
  if (v.rhs == -kInf) {
    v.note = "A2(-D, zbar, k) is empty: rule holds trivially";
    return v;
  }
  std::mt19937_64 rng(smp.seed);
  Mat xs = sample_interior(s.IT2S, smp.count, rng);
  for (const Vec& x : xs) {
    ++v.samples;
    double a = detail::slice_min(s.F2, x, m.v);
    double b = detail::slice_min(s.G2, x, m.k);
    double c = detail::slice_min(s.H2, x, m.w);
    if (a == kInf || b == kInf || c == kInf) {
      ++v.vacuous_samples;
      continue;
    }
    double lhs = a + b + c;
    double margin = lhs - v.rhs;
    if (std::isnan(margin)) margin = -kInf;
    if (margin < v.margin) {
      v.margin = margin;
      v.worst_x = x;
    }
  }
  v.holds = v.margin >= -tol;
  if (xs.empty()) v.note = "IT2(S, xbar, u) has empty interior at resolution";
  return v;
}

struct CQVerdict {
  bool holds = false;
  std::optional<Vec> deficiency;  // (k*, w*) nonnegative on the generated cone
  std::string note;
};

// Positive-spanning test for the second-order constraint qualification. The
// cone spans Z x W exactly when its dual cone is {0}; a nonzero dual vector
// is reported as the deficiency.
inline CQVerdict check_cq(const OptInstance& in, const CriticalTriple& t, const Sampler& smp) {
  (void)smp;
  in.validate();
  FirstOrder f = first_order(in);
  if (!is_critical(in, f, t)) raise(ErrorKind::precondition, "triple is not a critical direction");
  SecondOrder s = second_order(in, f, t);
  const std::size_t Qd = in.q, R = in.r, msize = Qd + R;
  CQVerdict out;
  Mat M;
  std::size_t width = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> c_terms;
  bool vacuous = !s.u_in_TS;
  if (!vacuous) {
    detail::JointCone J;
    auto x = J.alloc(in.n), z = J.alloc(Qd), zh = J.alloc(s.G2.hidden()), dd = J.alloc(Qd),
         w = J.alloc(R);
    J.place(s.S2, x);
    J.place(s.G2.P, detail::concat({x, z, zh}));
    J.place(s.A2negD, dd);
    J.place(s.H2.P, detail::concat({x, w}));
    M = J.dense();
    width = J.width;
    c_terms.assign(width, {});
    for (std::size_t i = 0; i < Qd; ++i) {
      c_terms[z[i]].emplace_back(i, 1.0);
      c_terms[dd[i]].emplace_back(i, -1.0);
    }
    for (std::size_t i = 0; i < R; ++i) c_terms[w[i]].emplace_back(Qd + i, 1.0);
  } else {
    out.note = "IT2(S, xbar, u) is empty: only cone(D + zbar) x {0} remains";
  }
  detail::DualSystem d = detail::dual_system(msize, M, width, c_terms, vacuous);
  // k* nonnegative on cone(D + zbar) = T(D, -zbar) = {A_I e <= 0}.
  Vec mz(in.zbar.size());
  for (std::size_t i = 0; i < mz.size(); ++i) mz[i] = -in.zbar[i];
  auto gens = tangent_cone(in.D, mz, in.tol).normal_generators;
  detail::add_cone_membership(d.lp, gens, 0, Qd, -1.0);
  auto m = detail::solve_normalised(d.lp, msize);
  out.holds = !m.has_value();
  if (m) {
    out.deficiency = *m;
    out.note = "a nonzero (k*, w*) is nonnegative on the generated cone";
  }
  return out;
}

// Extension H(x, t) = B(H(x), scale * t) in the max-norm, so that
// delta(0, H, x) = d(0, H(x)) / scale.
struct BallExtension {
  double scale = 1.0;
};

struct Claim2Level {
  int n = 0;
  double gamma = 0;
  double dist_H = 0;        // d(0, H(p_n))
  double proj_dist = 0;     // ||p_n - xhat_n||
  double proj_bound = 0;    // mu(theta d) + gamma^3
  double x_err = 0;         // ||x'_n - x||
  double x_bound = 0;       // mu(theta d) / (gamma^2/2) + 2 gamma
  bool in_omega = false;
  bool ok = false;
};

struct Claim2Sample {
  Vec x;
  std::string status;  // confirmed | failed | skipped: <reason>
  std::vector<Claim2Level> levels;
};

struct Claim2Verdict {
  bool holds = true;   // no sample failed
  std::size_t confirmed = 0, skipped = 0, failed = 0;
  bool vacuous() const { return confirmed == 0; }
  std::vector<Claim2Sample> samples;
};

namespace detail {

// min ||w|| over (p, w) in gph H; +inf if H(p) is empty.
inline double dist_zero_image(const Polyhedron& H, const Vec& p, std::size_t r) {
  const std::size_t n = p.size();
  LinearProgram lp(n + r + 1);
  const std::size_t t = n + r;
  lp.c[t] = -1.0;
  for (std::size_t j = 0; j < n; ++j) lp.add_sparse({{j, 1.0}}, Sense::eq, p[j]);
  H.constrain(lp, 0);
  for (std::size_t j = 0; j < r; ++j) {
    lp.add_sparse({{n + j, 1.0}, {t, -1.0}}, Sense::le, 0.0);
    lp.add_sparse({{n + j, -1.0}, {t, -1.0}}, Sense::le, 0.0);
  }
  LPResult res = solve_lp(lp, 1e-12, false);
  if (res.status != LPStatus::optimal) return kInf;
  return std::max(0.0, res.x[t]);
}

// Nearest point of S cap H^-1(0) to p in the max-norm.
inline std::optional<Vec> project_zero_set(const OptInstance& in, const Vec& p) {
  const std::size_t n = in.n, r = in.r;
  LinearProgram lp(n + 1);
  const std::size_t t = n;
  lp.c[t] = -1.0;
  in.S.constrain(lp, 0);
  for (std::size_t i = 0; i < in.H_graph.rows(); ++i) {
    Vec a(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) a[j] = in.H_graph.A[i][j];
    lp.add_row(std::move(a), Sense::le, in.H_graph.b[i]);  // w = 0
  }
  (void)r;
  for (std::size_t j = 0; j < n; ++j) {
    lp.add_sparse({{j, 1.0}, {t, -1.0}}, Sense::le, p[j]);
    lp.add_sparse({{j, -1.0}, {t, -1.0}}, Sense::le, -p[j]);
  }
  LPResult res = solve_lp(lp, 1e-12, false);
  if (res.status != LPStatus::optimal) return std::nullopt;
  return Vec(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n));
}

inline bool in_omega(const OptInstance& in, const Vec& x, double tol) {
  if (!in.S.contains(x, tol)) return false;
  if (!in.H_graph.contains(OptInstance::cat(x, Vec(in.r, 0.0)), tol)) return false;
  // G(x) meets -D.
  LinearProgram lp(in.q);
  for (std::size_t i = 0; i < in.G_graph.rows(); ++i) {
    Vec a(in.q);
    double rhs = in.G_graph.b[i];
    for (std::size_t j = 0; j < in.n; ++j) rhs -= in.G_graph.A[i][j] * x[j];
    for (std::size_t j = 0; j < in.q; ++j) a[j] = in.G_graph.A[i][in.n + j];
    lp.add_row(std::move(a), Sense::le, rhs);
  }
  in.negD().constrain(lp, 0);
  LPResult r = solve_lp(lp, 1e-12, false);
  return r.status == LPStatus::optimal && lp_violation(lp, r.x) <= tol;
}

// Moves each sample to its max-norm nearest point of the premise region:
// x in IT2(S, xbar, u), 0 in D2H(x), and D2G+(x) meeting IT2(-D, zbar, k).
// The region is typically a lower-dimensional slice that raw interior
// samples miss almost surely. Strict parts get half the largest achievable
// slack, so moved points stay strictly inside.
inline Mat kernel_samples(const OptInstance& in, const SecondOrder& s, const Mat& raw) {
  const std::size_t n = in.n, r = in.r, NH = s.H2.P.dim, NG = s.G2.P.dim;
  const std::size_t N = NH + NG;  // columns: [H block | G block | extra]
  auto base = [&]() {
    LinearProgram lp(N + 1);
    s.H2.P.constrain(lp, 0);
    s.G2.P.constrain(lp, NH);
    for (std::size_t j = 0; j < r; ++j) lp.add_sparse({{n + j, 1.0}}, Sense::eq, 0.0);
    for (std::size_t j = 0; j < n; ++j) lp.add_sparse({{j, 1.0}, {NH + j, -1.0}}, Sense::eq, 0.0);
    return lp;
  };
  // Strict rows on x and on z, each with slack coefficient `with`.
  auto strict_rows = [&](LinearProgram& lp, double with, double shift) {
    for (std::size_t i = 0; i < s.IT2S.rows(); ++i) {
      Vec a(N + 1, 0.0);
      for (std::size_t j = 0; j < n; ++j) a[j] = s.IT2S.A[i][j];
      a[N] = with;
      lp.add_row(std::move(a), Sense::le, s.IT2S.b[i] - shift);
    }
    for (std::size_t i = 0; i < s.A2negD.rows(); ++i) {
      Vec a(N + 1, 0.0);
      for (std::size_t j = 0; j < in.q; ++j) a[NH + n + j] = s.A2negD.A[i][j];
      a[N] = with;
      lp.add_row(std::move(a), Sense::le, s.A2negD.b[i] - shift);
    }
  };
  double sigma = 0;
  if (s.IT2S.rows() + s.A2negD.rows() > 0) {
    LinearProgram lp = base();
    lp.c[N] = 1.0;
    strict_rows(lp, 1.0, 0.0);
    lp.add_sparse({{N, 1.0}}, Sense::le, 1.0);
    LPResult res = solve_lp(lp, 1e-12, false);
    if (res.status != LPStatus::optimal || !(res.x[N] > in.tol)) return {};
    sigma = 0.5 * res.x[N];
  }
  Mat out;
  for (const Vec& x : raw) {
    LinearProgram lp = base();
    lp.c[N] = -1.0;
    strict_rows(lp, 0.0, sigma);
    for (std::size_t j = 0; j < n; ++j) {
      lp.add_sparse({{j, 1.0}, {N, -1.0}}, Sense::le, x[j]);
      lp.add_sparse({{j, -1.0}, {N, -1.0}}, Sense::le, -x[j]);
    }
    LPResult res = solve_lp(lp, 1e-12, false);
    if (res.status != LPStatus::optimal) return {};
    out.emplace_back(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

}  // namespace detail

// Follows the construction behind the lower estimate for T2(Omega, xbar, u)
// at gamma_n = 2^-n, n in [n_lo, n_hi], for sampled x in IT2(S, xbar, u).
inline Claim2Verdict check_claim2(const OptInstance& in, const CriticalTriple& t, const BallExtension& ext,
                                  const FunctionalModulus& mu, double theta, const Sampler& smp,
                                  int n_lo = 4, int n_hi = 12, const Mat* explicit_x = nullptr) {
  in.validate();
  const double tol = in.tol;
  if (!(ext.scale > 0)) raise(ErrorKind::precondition, "extension scale must be positive");
  if (!(theta > 0) || theta * ext.scale < 1.0 - 1e-12)
    raise(ErrorKind::precondition,
          "extension bound delta(0,H,x) <= theta d(0,H(x)) fails: need theta >= " +
              std::to_string(1.0 / ext.scale));
  if (!std::isfinite(mu.limsup_ratio_at_zero()))
    raise(ErrorKind::precondition, "limsup mu(t)/t at 0 is infinite");
  FirstOrder f = first_order(in);
  if (!is_critical(in, f, t)) raise(ErrorKind::precondition, "triple is not a critical direction");
  SecondOrder s = second_order(in, f, t);
  Claim2Verdict out;
  if (!s.u_in_TS) return out;
  Mat xs;
  if (explicit_x) {
    xs = *explicit_x;
  } else {
    std::mt19937_64 rng(smp.seed);
    xs = detail::kernel_samples(in, s, sample_interior(s.IT2S, smp.count, rng));
  }
  const Polyhedron IT2negD = [&] {
    Polyhedron P = s.A2negD;
    P.strict = true;
    return P;
  }();
  for (const Vec& x : xs) {
    Claim2Sample cs;
    cs.x = x;
    if (!s.IT2S.contains(x, tol)) {
      cs.status = "skipped: x is outside IT2(S, xbar, u)";
    } else if (!s.H2.contains(OptInstance::cat(x, Vec(in.r, 0.0)), tol)) {
      cs.status = "skipped: 0 is not in D2H(x)";
    } else {
      // z in D2G+(x) cap IT2(-D, zbar, k): maximise the strict slack.
      bool has_z = false;
      {
        const std::size_t N = s.G2.P.dim;
        LinearProgram lp(N + 1);
        const std::size_t sl = N;
        lp.c[sl] = 1.0;
        for (std::size_t j = 0; j < in.n; ++j) lp.add_sparse({{j, 1.0}}, Sense::eq, x[j]);
        s.G2.P.constrain(lp, 0);
        for (const auto& row : IT2negD.A) {
          Vec a(N + 1, 0.0);
          for (std::size_t j = 0; j < in.q; ++j) a[in.n + j] = row[j];
          a[sl] = 1.0;
          lp.add_row(std::move(a), Sense::le, 0.0);
        }
        lp.add_sparse({{sl, 1.0}}, Sense::le, 1.0);
        LPResult r = solve_lp(lp, 1e-12, false);
        has_z = r.status == LPStatus::optimal && (IT2negD.rows() == 0 || r.x[sl] > tol);
      }
      if (!has_z) {
        cs.status = "skipped: D2G+(x) misses IT2(-D, zbar, k)";
      } else {
        int first_good = n_hi + 1;
        for (int lvl = n_lo; lvl <= n_hi; ++lvl) {
          Claim2Level L;
          L.n = lvl;
          L.gamma = std::ldexp(1.0, -lvl);
          const double g = L.gamma, hg2 = 0.5 * g * g;
          Vec pn(in.n);
          for (std::size_t j = 0; j < in.n; ++j) pn[j] = in.xbar[j] + g * t.u[j] + hg2 * x[j];
          L.dist_H = detail::dist_zero_image(in.H_graph, pn, in.r);
          double mterm = mu(theta * L.dist_H);
          L.proj_bound = mterm + g * g * g;
          L.x_bound = mterm / hg2 + 2 * g;
          auto xh = detail::project_zero_set(in, pn);
          if (xh) {
            Vec diff(in.n), xp(in.n);
            for (std::size_t j = 0; j < in.n; ++j) {
              diff[j] = pn[j] - (*xh)[j];
              xp[j] = ((*xh)[j] - in.xbar[j] - g * t.u[j]) / hg2;
              diff[j] = std::abs(diff[j]);
            }
            L.proj_dist = norm_inf(diff);
            Vec e(in.n);
            for (std::size_t j = 0; j < in.n; ++j) e[j] = xp[j] - x[j];
            L.x_err = norm_inf(e);
            L.in_omega = detail::in_omega(in, *xh, 1e-9);
            L.ok = L.in_omega && L.proj_dist <= L.proj_bound + 1e-9 &&
                   L.x_err <= L.x_bound + 1e-9 / hg2;
          } else {
            L.proj_dist = kInf;
            L.x_err = kInf;
          }
          if (!L.ok) first_good = n_hi + 1;
          else if (first_good > n_hi) first_good = lvl;
          cs.levels.push_back(L);
        }
        // Eventually good, over at least the three finest levels.
        bool ok = first_good <= n_hi - 2;
        cs.status = ok ? "confirmed" : "failed";
      }
    }
    if (cs.status == "confirmed") ++out.confirmed;
    else if (cs.status == "failed") ++out.failed;
    else ++out.skipped;
    out.samples.push_back(std::move(cs));
  }
  out.holds = out.failed == 0;
  return out;
}

}  // namespace nlreg
