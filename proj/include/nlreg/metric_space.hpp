#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"

namespace nlreg {

enum class Metric { euclidean, manhattan, chebyshev, matrix };

inline const char* to_string(Metric m) {
  switch (m) {
    case Metric::euclidean: return "euclidean";
    case Metric::manhattan: return "manhattan";
    case Metric::chebyshev: return "chebyshev";
    case Metric::matrix: return "matrix";
  }
  return "?";
}

// Sorted, duplicate-free list of point indices.
using IndexSet = std::vector<std::size_t>;

inline bool contains(const IndexSet& s, std::size_t i) {
  return std::binary_search(s.begin(), s.end(), i);
}

inline bool is_subset(const IndexSet& a, const IndexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

inline IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

inline IndexSet normalized(IndexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

// A finite metric space. Immutable after construction. Norm metrics compute
// distances from coordinates; small spaces additionally cache the matrix.
class FiniteMetricSpace {
 public:
  static constexpr std::size_t kCacheLimit = 1024;

  FiniteMetricSpace() = default;

  static FiniteMetricSpace from_points(std::vector<std::vector<double>> pts,
                                       Metric metric,
                                       std::vector<std::string> labels = {}) {
    if (metric == Metric::matrix)
      raise(ErrorKind::schema, "coordinate space cannot use the matrix metric");
    FiniteMetricSpace s;
    s.metric_ = metric;
    s.n_ = pts.size();
    s.dim_ = pts.empty() ? 0 : pts.front().size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].size() != s.dim_)
        raise(ErrorKind::schema, "point " + std::to_string(i) +
                                     " has dimension " +
                                     std::to_string(pts[i].size()),
              "/points/" + std::to_string(i));
      for (double c : pts[i])
        if (!std::isfinite(c))
          raise(ErrorKind::schema, "non-finite coordinate",
                "/points/" + std::to_string(i));
    }
    s.coords_ = std::move(pts);
    s.set_labels(std::move(labels));
    s.build_cache();
    s.require_separated();
    return s;
  }

  // Explicit distance matrix; validated exhaustively including the O(n^3)
  // triangle audit.
  static FiniteMetricSpace from_matrix(std::vector<std::vector<double>> d,
                                       std::vector<std::string> labels = {},
                                       double triangle_tol = 1e-9) {
    FiniteMetricSpace s;
    s.metric_ = Metric::matrix;
    s.n_ = d.size();
    for (std::size_t i = 0; i < s.n_; ++i) {
      if (d[i].size() != s.n_)
        raise(ErrorKind::schema, "dmatrix row has wrong length",
              "/dmatrix/" + std::to_string(i));
      for (std::size_t j = 0; j < s.n_; ++j) {
        double v = d[i][j];
        std::string loc =
            "/dmatrix/" + std::to_string(i) + "/" + std::to_string(j);
        if (!std::isfinite(v) || v < 0)
          raise(ErrorKind::invariant, "distance must be finite and >= 0", loc);
        if (i == j && v != 0)
          raise(ErrorKind::invariant, "d(p,p) must be 0", loc);
        if (v != d[j][i])
          raise(ErrorKind::invariant, "matrix is not symmetric", loc);
        if (i != j && v == 0)
          raise(ErrorKind::invariant, "distinct points at distance 0", loc);
      }
    }
    for (std::size_t i = 0; i < s.n_; ++i)
      for (std::size_t j = 0; j < s.n_; ++j)
        for (std::size_t k = 0; k < s.n_; ++k)
          if (d[i][k] > d[i][j] + d[j][k] + triangle_tol)
            raise(ErrorKind::invariant,
                  "triangle inequality violated for triple (" +
                      std::to_string(i) + "," + std::to_string(j) + "," +
                      std::to_string(k) + ") by " +
                      std::to_string(d[i][k] - d[i][j] - d[j][k]),
                  "/dmatrix/" + std::to_string(i) + "/" + std::to_string(k));
    s.cache_.resize(s.n_ * s.n_);
    for (std::size_t i = 0; i < s.n_; ++i)
      for (std::size_t j = 0; j < s.n_; ++j) s.cache_[i * s.n_ + j] = d[i][j];
    s.set_labels(std::move(labels));
    return s;
  }

  // Convenience: points on the real line.
  static FiniteMetricSpace line(const std::vector<double>& xs) {
    std::vector<std::vector<double>> pts;
    pts.reserve(xs.size());
    for (double x : xs) pts.push_back({x});
    return from_points(std::move(pts), Metric::euclidean);
  }

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  Metric metric() const { return metric_; }
  bool has_coordinates() const { return metric_ != Metric::matrix; }
  const std::vector<double>& coords(std::size_t i) const {
    check_index(i);
    return coords_.at(i);
  }
  const std::vector<std::vector<double>>& all_coords() const { return coords_; }
  const std::vector<std::string>& labels() const { return labels_; }

  void check_index(std::size_t i) const {
    if (i >= n_)
      raise(ErrorKind::index, "point index " + std::to_string(i) +
                                  " out of range (size " + std::to_string(n_) +
                                  ")");
  }

  double distance(std::size_t i, std::size_t j) const {
    if (!cache_.empty()) return cache_[i * n_ + j];
    return raw(i, j);
  }
  double operator()(std::size_t i, std::size_t j) const {
    return distance(i, j);
  }

  double diameter() const {
    double best = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        best = std::max(best, distance(i, j));
    return best;
  }

  IndexSet all() const {
    IndexSet s(n_);
    for (std::size_t i = 0; i < n_; ++i) s[i] = i;
    return s;
  }

 private:
  double raw(std::size_t i, std::size_t j) const {
    const auto& a = coords_[i];
    const auto& b = coords_[j];
    double acc = 0;
    switch (metric_) {
      case Metric::euclidean:
        for (std::size_t k = 0; k < dim_; ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
        return std::sqrt(acc);
      case Metric::manhattan:
        for (std::size_t k = 0; k < dim_; ++k) acc += std::abs(a[k] - b[k]);
        return acc;
      case Metric::chebyshev:
        for (std::size_t k = 0; k < dim_; ++k)
          acc = std::max(acc, std::abs(a[k] - b[k]));
        return acc;
      case Metric::matrix:
        break;
    }
    return cache_[i * n_ + j];
  }

  void build_cache() {
    if (n_ > kCacheLimit) return;
    std::vector<double> c(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j)
        c[i * n_ + j] = c[j * n_ + i] = (i == j ? 0.0 : raw(i, j));
    cache_ = std::move(c);
  }

  // Distinct indices must be distinct points, otherwise d is a pseudometric.
  void require_separated() const {
    std::vector<std::size_t> order(n_);
    for (std::size_t i = 0; i < n_; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return coords_[a] < coords_[b]; });
    for (std::size_t i = 1; i < n_; ++i)
      if (coords_[order[i]] == coords_[order[i - 1]])
        raise(ErrorKind::invariant,
              "points " + std::to_string(order[i - 1]) + " and " +
                  std::to_string(order[i]) + " coincide",
              "/points/" + std::to_string(std::max(order[i], order[i - 1])));
  }

  void set_labels(std::vector<std::string> labels) {
    if (!labels.empty() && labels.size() != n_)
      raise(ErrorKind::schema, "labels and points differ in count", "/labels");
    labels_ = std::move(labels);
  }

  Metric metric_ = Metric::euclidean;
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> coords_;
  std::vector<std::string> labels_;
  std::vector<double> cache_;
};

enum class BallKind { open, closed };

struct BallSpec {
  std::size_t center = 0;
  double radius = 0;
  BallKind kind = BallKind::open;
};

// d(x,S); +inf for empty S.
inline double point_set_distance(const FiniteMetricSpace& space, std::size_t x,
                                 const IndexSet& S) {
  space.check_index(x);
  double best = kInf;
  for (std::size_t s : S) {
    space.check_index(s);
    best = std::min(best, space(x, s));
  }
  return best;
}

// Open balls use d < r - tol, closed balls d <= r + tol; B(x,0) = {x}.
inline IndexSet ball_members(const FiniteMetricSpace& space,
                             const BallSpec& ball, double tol = 1e-12) {
  space.check_index(ball.center);
  if (!(ball.radius >= 0))
    raise(ErrorKind::domain, "ball radius must be nonnegative");
  if (ball.kind == BallKind::open && ball.radius == 0) return {ball.center};
  IndexSet out;
  for (std::size_t p = 0; p < space.size(); ++p) {
    double d = space(ball.center, p);
    bool in = ball.kind == BallKind::open ? lt_strict(d, ball.radius, tol)
                                          : le_tol(d, ball.radius, tol);
    if (in) out.push_back(p);
  }
  return out;
}

// sup_{a in A} d(a,B): 0 for empty A, +inf for nonempty A and empty B.
inline double excess(const FiniteMetricSpace& space, const IndexSet& A,
                     const IndexSet& B) {
  double worst = 0;
  for (std::size_t a : A) worst = std::max(worst, point_set_distance(space, a, B));
  return worst;
}

}  // namespace nlreg
