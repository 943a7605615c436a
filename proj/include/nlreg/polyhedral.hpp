#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "error.hpp"
#include "lp.hpp"
#include "numeric.hpp"

namespace nlreg {

// {x : A x <= b} with unit rows. `strict` marks the interior variant
// {x : A x < b} of a cone returned by the tangent calculus.
struct Polyhedron {
  std::size_t dim = 0;
  Mat A;
  Vec b;
  bool strict = false;

  static Polyhedron make(std::size_t dim, Mat A, Vec b, const std::string& where = {}) {
    if (A.size() != b.size()) raise(ErrorKind::size, "A and b row counts differ", where);
    Polyhedron P;
    P.dim = dim;
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (A[i].size() != dim)
        raise(ErrorKind::size, "row has " + std::to_string(A[i].size()) + " entries, expected " +
                                   std::to_string(dim), where + "/A/" + std::to_string(i));
      double s = std::sqrt(dot(A[i], A[i]));
      if (!(s > 0)) {
        if (b[i] < 0) raise(ErrorKind::invariant, "zero row with negative bound", where + "/b/" + std::to_string(i));
        continue;  // 0 <= b_i: no constraint
      }
      for (double& v : A[i]) v /= s;
      P.A.push_back(std::move(A[i]));
      P.b.push_back(b[i] / s);
    }
    return P;
  }

  static Polyhedron whole(std::size_t dim) {
    Polyhedron P;
    P.dim = dim;
    return P;
  }

  std::size_t rows() const { return A.size(); }
  bool is_cone() const {
    return std::all_of(b.begin(), b.end(), [](double v) { return v == 0; });
  }

  // max_i (a_i x - b_i), or -inf without rows.
  double violation(const Vec& x) const {
    double m = -kInf;
    for (std::size_t i = 0; i < rows(); ++i) m = std::max(m, dot(A[i], x) - b[i]);
    return m;
  }

  bool contains(const Vec& x, double tol) const {
    if (x.size() != dim) raise(ErrorKind::size, "point has the wrong dimension");
    double v = violation(x);
    return strict ? v < -tol || rows() == 0 : v <= tol;
  }

  std::vector<std::size_t> active(const Vec& x, double tol) const {
    std::vector<std::size_t> I;
    for (std::size_t i = 0; i < rows(); ++i)
      if (std::abs(dot(A[i], x) - b[i]) <= tol) I.push_back(i);
    return I;
  }

  Polyhedron subset(const std::vector<std::size_t>& I, bool zero_rhs) const {
    Polyhedron P;
    P.dim = dim;
    for (std::size_t i : I) {
      P.A.push_back(A[i]);
      P.b.push_back(zero_rhs ? 0.0 : b[i]);
    }
    return P;
  }

  // Adds the rows as le-constraints on variables [offset, offset + dim).
  void constrain(LinearProgram& lp, std::size_t offset) const {
    for (std::size_t i = 0; i < rows(); ++i) {
      Vec a(lp.n, 0.0);
      for (std::size_t j = 0; j < dim; ++j) a[offset + j] = A[i][j];
      lp.add_row(std::move(a), Sense::le, b[i]);
    }
  }

  std::optional<Vec> find_point(double eps = 1e-9) const {
    LinearProgram lp(dim);
    constrain(lp, 0);
    LPResult r = solve_lp(lp, eps);
    if (r.status == LPStatus::infeasible) return std::nullopt;
    return r.x;
  }

  // Point maximising the smallest slack inside the unit box, with that slack.
  std::pair<Vec, double> chebyshev_point(double box = 1.0) const {
    LinearProgram lp(dim + 1);
    const std::size_t s = dim;
    lp.c[s] = 1.0;
    for (std::size_t i = 0; i < rows(); ++i) {
      Vec a(dim + 1, 0.0);
      for (std::size_t j = 0; j < dim; ++j) a[j] = A[i][j];
      a[s] = 1.0;
      lp.add_row(std::move(a), Sense::le, b[i]);
    }
    for (std::size_t j = 0; j < dim; ++j) {
      lp.add_sparse({{j, 1.0}}, Sense::le, box);
      lp.add_sparse({{j, 1.0}}, Sense::ge, -box);
    }
    lp.add_sparse({{s, 1.0}}, Sense::le, 1.0);
    LPResult r = solve_lp(lp);
    if (r.status != LPStatus::optimal) return {Vec(dim, 0.0), -kInf};
    Vec x(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(dim));
    return {x, r.x[s]};
  }
};

struct TangentCones {
  Polyhedron T;                       // {d : A_I d <= 0}
  Polyhedron IT;                      // same rows, strict
  std::vector<std::size_t> active;    // I, as row indices of the input
  Mat normal_generators;              // N = cone{a_i : i in I}
};

// Tangent, interior tangent and normal cones of P at xbar.
inline TangentCones tangent_cone(const Polyhedron& P, const Vec& xbar, double tol = 1e-9) {
  if (xbar.size() != P.dim) raise(ErrorKind::size, "base point has the wrong dimension");
  if (!(P.violation(xbar) <= tol)) raise(ErrorKind::precondition, "base point is not in the polyhedron");
  TangentCones out;
  out.active = P.active(xbar, tol);
  out.T = P.subset(out.active, true);
  out.IT = out.T;
  out.IT.strict = true;
  for (std::size_t i : out.active) out.normal_generators.push_back(P.A[i]);
  return out;
}

struct SecondOrderSets {
  Polyhedron T2;   // second-order contingent set
  Polyhedron A2;   // adjacent set; equal to T2 for polyhedra
  Polyhedron IT2;  // strict variant
};

// T2 = A2 = T(T(P,xbar),u) for polyhedra.
inline SecondOrderSets second_order_sets(const Polyhedron& P, const Vec& xbar, const Vec& u,
                                         double tol = 1e-9) {
  TangentCones tc = tangent_cone(P, xbar, tol);
  if (u.size() != P.dim) raise(ErrorKind::size, "direction has the wrong dimension");
  if (!tc.T.contains(u, tol)) raise(ErrorKind::precondition, "direction is outside the tangent cone");
  TangentCones inner = tangent_cone(tc.T, u, tol);
  SecondOrderSets s;
  s.T2 = inner.T;
  s.A2 = inner.T;
  s.IT2 = inner.IT;
  return s;
}

// Sampled-limit membership: is x + g d + (g^2/2) w within tol*g^order of P
// along g = 2^-n? Decided at n = levels, the finest sampled level, with the
// slack at the base clamped at 0.
inline bool sampled_limit_member(const Polyhedron& P, const Vec& xbar, const Vec& d,
                                 const Vec* w = nullptr, int levels = 20, double tol = 1e-6) {
  const double g = std::ldexp(1.0, -levels);
  double worst = -kInf;
  for (std::size_t i = 0; i < P.rows(); ++i) {
    double slack = std::max(0.0, P.b[i] - dot(P.A[i], xbar));
    double ad = dot(P.A[i], d);
    double r = w ? (ad / g + 0.5 * dot(P.A[i], *w) - slack / (g * g)) * 2.0
                 : ad - slack / g;
    worst = std::max(worst, r);
  }
  return worst <= tol;
}

// Polyhedron in (visible, hidden) coordinates, standing for its projection
// onto the first `visible` coordinates. Tangent cones commute with the
// projection, so the calculus runs on the lifted description.
struct Lifted {
  Polyhedron P;
  std::size_t visible = 0;

  std::size_t hidden() const { return P.dim - visible; }

  // Hidden coordinates making (v, h) feasible, if any.
  std::optional<Vec> lift(const Vec& v, double tol = 1e-9) const {
    if (v.size() != visible) raise(ErrorKind::size, "visible point has the wrong dimension");
    LinearProgram lp(P.dim);
    for (std::size_t j = 0; j < visible; ++j) lp.add_sparse({{j, 1.0}}, Sense::eq, v[j]);
    P.constrain(lp, 0);
    LPResult r = solve_lp(lp);
    if (r.status == LPStatus::infeasible) return std::nullopt;
    if (lp_violation(lp, r.x) > tol) return std::nullopt;
    return r.x;
  }

  bool contains(const Vec& v, double tol = 1e-9) const { return lift(v, tol).has_value(); }

  Lifted tangent_at(const Vec& full, double tol = 1e-9) const {
    return {tangent_cone(P, full, tol).T, visible};
  }
};

// T(T(P, p), d) for a lifted cone given by its full tangent description: the
// visible direction is lifted first.
inline Lifted lifted_second_order(const Lifted& tangent, const Vec& dir, double tol = 1e-9) {
  auto full = tangent.lift(dir, tol);
  if (!full) raise(ErrorKind::precondition, "direction is outside the lifted tangent cone");
  return tangent.tangent_at(*full, tol);
}

// Draws points from the interior of a cone {A x < 0} (or all of R^n without
// rows) in the unit box. Points are pulled towards a Chebyshev centre until
// strictly inside. Empty when the interior is empty.
inline Mat sample_interior(const Polyhedron& cone, std::size_t count, std::mt19937_64& rng,
                           double margin = 1e-9) {
  auto [centre, slack] = cone.chebyshev_point(1.0);
  Mat out;
  if (cone.rows() > 0 && !(slack > margin)) return out;
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    Vec x(cone.dim);
    for (double& v : x) v = U(rng);
    for (int it = 0; it < 60 && cone.rows() > 0 && !(cone.violation(x) < -margin); ++it)
      for (std::size_t j = 0; j < x.size(); ++j) x[j] = 0.5 * (x[j] + centre[j]);
    if (cone.rows() == 0 || cone.violation(x) < -margin) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace nlreg
