#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"

namespace nlreg {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_inf(const Vec& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double norm1(const Vec& a) {
  double s = 0;
  for (double v : a) s += std::abs(v);
  return s;
}

enum class Sense { le, ge, eq };

enum class LPStatus { optimal, infeasible, unbounded };

inline const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
  }
  return "?";
}

// maximize c.x subject to row constraints; variables are free unless
// marked nonnegative. An empty objective means pure feasibility.
struct LinearProgram {
  std::size_t n = 0;
  std::vector<char> nonneg;
  Mat A;
  std::vector<Sense> sense;
  Vec b;
  Vec c;

  explicit LinearProgram(std::size_t vars = 0) : n(vars), nonneg(vars, 0), c(vars, 0.0) {}

  std::size_t add_var(bool nn = false, double cost = 0) {
    nonneg.push_back(nn ? 1 : 0);
    c.push_back(cost);
    for (auto& r : A) r.push_back(0.0);
    return n++;
  }

  void add_row(Vec a, Sense s, double rhs) {
    if (a.size() != n) raise(ErrorKind::size, "LP row has the wrong width");
    A.push_back(std::move(a));
    sense.push_back(s);
    b.push_back(rhs);
  }

  // Row with the given (index, coefficient) terms.
  void add_sparse(const std::vector<std::pair<std::size_t, double>>& terms, Sense s, double rhs) {
    Vec a(n, 0.0);
    for (auto [j, v] : terms) a.at(j) += v;
    add_row(std::move(a), s, rhs);
  }

  std::size_t rows() const { return A.size(); }
};

struct LPResult {
  LPStatus status = LPStatus::infeasible;
  Vec x;
  double value = -kInf;
  // Infeasible: y with sign(y_i) matching the row sense (le >= 0, ge <= 0),
  // A^T y >= 0 on nonnegative columns, = 0 on free ones, and b.y < 0.
  Vec farkas;
  // Unbounded: a feasible direction with c.ray > 0.
  Vec ray;
};

namespace detail {

// Dense two-phase simplex with Bland's rule on max c.x, Ax = b, x >= 0.
class Simplex {
 public:
  Simplex(Mat A, Vec b, Vec c, double eps) : m_(A.size()), n_(c.size()), eps_(eps) {
    // Columns: structural [0, n), artificial [n, n + m), rhs last.
    width_ = n_ + m_ + 1;
    T_.assign(m_ + 1, Vec(width_, 0.0));
    basis_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      double sgn = b[i] < 0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) T_[i][j] = sgn * A[i][j];
      T_[i][n_ + i] = 1.0;
      T_[i][width_ - 1] = sgn * b[i];
      basis_[i] = n_ + i;
    }
    c_ = std::move(c);
  }

  LPStatus run(Vec& x, double& value, Vec& ray) {
    // Phase 1: maximize -sum(artificials).
    Vec& obj = T_[m_];
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < width_; ++j)
        if (j < n_ || j == width_ - 1) obj[j] -= T_[i][j];
    // Reduced-cost row holds -(c_j - z_j); entering columns have obj[j] < 0.
    iterate(n_ + m_, nullptr);
    if (-T_[m_][width_ - 1] > eps_ * std::max(1.0, scale())) return LPStatus::infeasible;
    drive_out_artificials();

    // Phase 2 objective row for max c.x.
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) obj[j] = -c_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      std::size_t bj = basis_[i];
      if (bj < n_ && c_[bj] != 0) {
        double f = c_[bj];
        for (std::size_t j = 0; j < width_; ++j) obj[j] += f * T_[i][j];
      }
    }
    std::size_t unbounded_col = SIZE_MAX;
    iterate(n_, &unbounded_col);
    x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = T_[i][width_ - 1];
    if (unbounded_col != SIZE_MAX) {
      ray.assign(n_, 0.0);
      ray[unbounded_col] = 1.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] < n_) ray[basis_[i]] = -T_[i][unbounded_col];
      return LPStatus::unbounded;
    }
    value = T_[m_][width_ - 1];
    return LPStatus::optimal;
  }

 private:
  double scale() const {
    double s = 0;
    for (std::size_t i = 0; i < m_; ++i) s = std::max(s, std::abs(T_[i][width_ - 1]));
    return s;
  }

  void pivot(std::size_t r, std::size_t col) {
    double p = T_[r][col];
    for (double& v : T_[r]) v /= p;
    T_[r][col] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double f = T_[i][col];
      if (f == 0) continue;
      for (std::size_t j = 0; j < width_; ++j) T_[i][j] -= f * T_[r][j];
      T_[i][col] = 0.0;
    }
    basis_[r] = col;
  }

  // Columns below `limit` may enter. Bland: smallest eligible column, then
  // smallest basis index among tied ratios.
  void iterate(std::size_t limit, std::size_t* unbounded_col) {
    const std::size_t max_iter = 50'000;
    for (std::size_t it = 0; it < max_iter; ++it) {
      std::size_t enter = SIZE_MAX;
      for (std::size_t j = 0; j < limit; ++j)
        if (T_[m_][j] < -eps_) {
          enter = j;
          break;
        }
      if (enter == SIZE_MAX) return;
      std::size_t leave = SIZE_MAX;
      double best = kInf;
      for (std::size_t i = 0; i < m_; ++i) {
        double a = T_[i][enter];
        if (a <= eps_) continue;
        double ratio = T_[i][width_ - 1] / a;
        if (ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == SIZE_MAX) {
        if (unbounded_col) *unbounded_col = enter;
        return;
      }
      pivot(leave, enter);
    }
    raise(ErrorKind::invariant, "simplex iteration limit reached");
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      std::size_t col = SIZE_MAX;
      double best = eps_;
      for (std::size_t j = 0; j < n_; ++j)
        if (std::abs(T_[i][j]) > best) {
          best = std::abs(T_[i][j]);
          col = j;
        }
      if (col != SIZE_MAX) pivot(i, col);
      // Otherwise the row is redundant and its artificial stays at zero.
    }
  }

  std::size_t m_, n_, width_;
  double eps_;
  Mat T_;
  std::vector<std::size_t> basis_;
  Vec c_;
};

}  // namespace detail

inline LPResult solve_lp(const LinearProgram& lp, double eps = 1e-9, bool want_farkas = true);

namespace detail {

// y per row with the certificate sign pattern, boxed to [-1, 1], minimizing b.y.
inline Vec farkas_certificate(const LinearProgram& lp, double eps) {
  const std::size_t m = lp.rows();
  LinearProgram aux(m);
  for (std::size_t i = 0; i < m; ++i) {
    aux.c[i] = -lp.b[i];
    aux.add_sparse({{i, 1.0}}, Sense::le, 1.0);
    aux.add_sparse({{i, 1.0}}, Sense::ge, -1.0);
    if (lp.sense[i] == Sense::le) aux.add_sparse({{i, 1.0}}, Sense::ge, 0.0);
    if (lp.sense[i] == Sense::ge) aux.add_sparse({{i, 1.0}}, Sense::le, 0.0);
  }
  for (std::size_t j = 0; j < lp.n; ++j) {
    Vec col(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) col[i] = lp.A[i][j];
    aux.add_row(std::move(col), lp.nonneg[j] ? Sense::ge : Sense::eq, 0.0);
  }
  LPResult r = solve_lp(aux, eps, false);
  if (r.status != LPStatus::optimal || r.value <= eps) return {};
  return r.x;
}

}  // namespace detail

inline LPResult solve_lp(const LinearProgram& lp, double eps, bool want_farkas) {
  // Standard form: free x_j = p_j - q_j, one slack per inequality row.
  const std::size_t m = lp.rows();
  std::vector<std::size_t> pos(lp.n), neg(lp.n, SIZE_MAX);
  std::size_t cols = 0;
  for (std::size_t j = 0; j < lp.n; ++j) {
    pos[j] = cols++;
    if (!lp.nonneg[j]) neg[j] = cols++;
  }
  std::vector<std::size_t> slack(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i)
    if (lp.sense[i] != Sense::eq) slack[i] = cols++;
  Mat A(m, Vec(cols, 0.0));
  Vec c(cols, 0.0);
  for (std::size_t j = 0; j < lp.n; ++j) {
    double cj = j < lp.c.size() ? lp.c[j] : 0.0;
    c[pos[j]] = cj;
    if (neg[j] != SIZE_MAX) c[neg[j]] = -cj;
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < lp.n; ++j) {
      A[i][pos[j]] = lp.A[i][j];
      if (neg[j] != SIZE_MAX) A[i][neg[j]] = -lp.A[i][j];
    }
    if (lp.sense[i] == Sense::le) A[i][slack[i]] = 1.0;
    if (lp.sense[i] == Sense::ge) A[i][slack[i]] = -1.0;
  }
  detail::Simplex sx(std::move(A), lp.b, std::move(c), eps);
  Vec xs, rays;
  LPResult out;
  out.status = sx.run(xs, out.value, rays);
  auto back = [&](const Vec& s) {
    Vec x(lp.n, 0.0);
    for (std::size_t j = 0; j < lp.n; ++j)
      x[j] = s[pos[j]] - (neg[j] != SIZE_MAX ? s[neg[j]] : 0.0);
    return x;
  };
  if (out.status == LPStatus::infeasible) {
    out.value = -kInf;
    if (want_farkas) out.farkas = detail::farkas_certificate(lp, eps);
    return out;
  }
  out.x = back(xs);
  if (out.status == LPStatus::unbounded) {
    out.ray = back(rays);
    out.value = kInf;
  }
  return out;
}

// Largest violation of the constraints at x (0 when feasible).
inline double lp_violation(const LinearProgram& lp, const Vec& x) {
  double worst = 0;
  for (std::size_t j = 0; j < lp.n; ++j)
    if (lp.nonneg[j]) worst = std::max(worst, -x[j]);
  for (std::size_t i = 0; i < lp.rows(); ++i) {
    double r = dot(lp.A[i], x) - lp.b[i];
    switch (lp.sense[i]) {
      case Sense::le: worst = std::max(worst, r); break;
      case Sense::ge: worst = std::max(worst, -r); break;
      case Sense::eq: worst = std::max(worst, std::abs(r)); break;
    }
  }
  return worst;
}

// Checks a Farkas certificate independently of the solver.
inline bool farkas_valid(const LinearProgram& lp, const Vec& y, double tol = 1e-9) {
  if (y.size() != lp.rows()) return false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (lp.sense[i] == Sense::le && y[i] < -tol) return false;
    if (lp.sense[i] == Sense::ge && y[i] > tol) return false;
  }
  for (std::size_t j = 0; j < lp.n; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += lp.A[i][j] * y[i];
    if (lp.nonneg[j] ? s < -tol : std::abs(s) > tol) return false;
  }
  return dot(lp.b, y) < -tol;
}

}  // namespace nlreg
