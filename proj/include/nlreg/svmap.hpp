#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "error.hpp"
#include "metric_space.hpp"
#include "numeric.hpp"

namespace nlreg {

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

inline SpacePtr share(FiniteMetricSpace s) {
  return std::make_shared<const FiniteMetricSpace>(std::move(s));
}

// Where a real parameter lands on the ladder.
struct LevelSnap {
  std::size_t index = 0;
  bool snapped = false;           // value was strictly between two levels
  bool below_resolution = false;  // 0 < value < smallest positive level
};

// Finite parameter ladder: strictly increasing, starts at 0.
class TLadder {
 public:
  TLadder() : levels_{0.0} {}

  explicit TLadder(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.empty() || levels_.front() != 0.0)
      raise(ErrorKind::schema, "ladder must start at 0", "/ladder/0");
    for (std::size_t i = 1; i < levels_.size(); ++i)
      if (!(levels_[i] > levels_[i - 1]) || !std::isfinite(levels_[i]))
        raise(ErrorKind::schema, "ladder must be strictly increasing and finite",
              "/ladder/" + std::to_string(i));
  }

  // 0, step, 2 step, ..., count-1 steps.
  static TLadder uniform(double step, std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = step * static_cast<double>(i);
    return TLadder(std::move(v));
  }

  std::size_t size() const { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_.at(i); }
  const std::vector<double>& levels() const { return levels_; }
  bool has_positive() const { return levels_.size() > 1; }
  double smallest_positive() const { return has_positive() ? levels_[1] : kInf; }
  double top() const { return levels_.back(); }

  double max_gap() const {
    double g = 0;
    for (std::size_t i = 1; i < levels_.size(); ++i)
      g = std::max(g, levels_[i] - levels_[i - 1]);
    return g;
  }

  std::optional<std::size_t> index_of(double t, double tol = 0) const {
    auto it = std::lower_bound(levels_.begin(), levels_.end(), t - tol);
    if (it != levels_.end() && std::abs(*it - t) <= tol)
      return static_cast<std::size_t>(it - levels_.begin());
    return std::nullopt;
  }

  std::size_t require_index(double t, double tol = 0) const {
    auto i = index_of(t, tol);
    if (!i) raise(ErrorKind::domain, "level " + std::to_string(t) + " is not on the ladder");
    return *i;
  }

  // Values within tol of a level land on it; values between levels go to
  // the nearest level above; values below the smallest positive level go
  // to level 0 and are flagged. Values above the top cannot be placed.
  LevelSnap snap(double tau, double tol) const {
    if (!(tau >= 0)) raise(ErrorKind::domain, "negative ladder parameter");
    if (tau <= tol) return {0, false, false};
    if (!has_positive() || tau < levels_[1] - tol) return {0, true, true};
    if (auto i = index_of(tau, tol)) return {*i, false, false};
    auto it = std::upper_bound(levels_.begin(), levels_.end(), tau);
    if (it == levels_.end())
      raise(ErrorKind::resolution,
            "parameter " + std::to_string(tau) + " lies above the top ladder level " +
                std::to_string(top()));
    return {static_cast<std::size_t>(it - levels_.begin()), true, false};
  }

 private:
  std::vector<double> levels_;
};

// A map Phi: R+ => X known on the ladder, one fibre per level.
struct Fibration {
  SpacePtr X;
  TLadder ladder;
  std::vector<IndexSet> fibres;

  const FiniteMetricSpace& space() const { return *X; }
  const IndexSet& at(std::size_t level) const { return fibres.at(level); }
};

struct Triple {
  std::size_t x = 0;
  std::size_t t = 0;  // ladder level index
  std::size_t y = 0;
  friend bool operator<(const Triple& a, const Triple& b) {
    return std::tie(a.x, a.t, a.y) < std::tie(b.x, b.t, b.y);
  }
  friend bool operator==(const Triple& a, const Triple& b) {
    return a.x == b.x && a.t == b.t && a.y == b.y;
  }
};

// F: X x T => Y on a finite ladder. The graph is held as a dense membership
// cube (level-major) which doubles as the (x,t) and (y,t) index.
class ParamSetValuedMap {
 public:
  static constexpr std::size_t kCubeLimit = 200'000'000;

  ParamSetValuedMap() = default;

  ParamSetValuedMap(SpacePtr X, SpacePtr Y, TLadder ladder,
                    const std::vector<Triple>& graph, bool monotone = false)
      : X_(std::move(X)), Y_(std::move(Y)), ladder_(std::move(ladder)) {
    nx_ = X_->size();
    ny_ = Y_->size();
    std::size_t cells = ladder_.size() * nx_ * ny_;
    if (nx_ != 0 && ny_ != 0 && cells / nx_ / ny_ != ladder_.size())
      raise(ErrorKind::size, "graph cube overflows");
    if (cells > kCubeLimit)
      raise(ErrorKind::size, "graph cube of " + std::to_string(cells) +
                                 " cells exceeds the cap");
    cube_.assign(cells, 0);
    for (std::size_t i = 0; i < graph.size(); ++i) {
      const Triple& g = graph[i];
      if (g.x >= nx_ || g.t >= ladder_.size() || g.y >= ny_)
        raise(ErrorKind::index, "graph triple references an invalid index",
              "/graph/" + std::to_string(i));
      cube_[cell(g.x, g.t, g.y)] = 1;
    }
    if (monotone) {
      for (std::size_t x = 0; x < nx_; ++x)
        for (std::size_t y = 0; y < ny_; ++y)
          for (std::size_t t = 1; t + 1 < ladder_.size(); ++t)
            if (contains(x, t, y) && !contains(x, t + 1, y))
              raise(ErrorKind::invariant,
                    "monotonicity flag set but (" + std::to_string(x) + "," +
                        std::to_string(t) + "," + std::to_string(y) +
                        ") is not carried to the next level",
                    "/graph");
      monotone_ = true;
    }
  }

  // Graph given by a membership predicate pred(x, t, y).
  template <class Pred>
  static ParamSetValuedMap from_membership(SpacePtr X, SpacePtr Y, TLadder ladder,
                                           Pred pred, bool monotone = false) {
    ParamSetValuedMap F(std::move(X), std::move(Y), std::move(ladder), {}, false);
    for (std::size_t t = 0; t < F.ladder_.size(); ++t)
      for (std::size_t x = 0; x < F.nx_; ++x)
        for (std::size_t y = 0; y < F.ny_; ++y)
          if (pred(x, t, y)) F.cube_[F.cell(x, t, y)] = 1;
    if (monotone) {
      if (!F.is_monotone())
        raise(ErrorKind::invariant, "monotonicity flag set on a non-monotone graph", "/graph");
      F.monotone_ = true;
    }
    return F;
  }

  const FiniteMetricSpace& X() const { return *X_; }
  const FiniteMetricSpace& Y() const { return *Y_; }
  const SpacePtr& X_ptr() const { return X_; }
  const SpacePtr& Y_ptr() const { return Y_; }
  const TLadder& ladder() const { return ladder_; }
  bool monotone() const { return monotone_; }

  bool contains(std::size_t x, std::size_t t, std::size_t y) const {
    return cube_[cell(x, t, y)] != 0;
  }

  IndexSet image(std::size_t x, std::size_t t) const {
    X_->check_index(x);
    check_level(t);
    IndexSet out;
    for (std::size_t y = 0; y < ny_; ++y)
      if (contains(x, t, y)) out.push_back(y);
    return out;
  }

  IndexSet inverse(std::size_t t, std::size_t y) const {
    Y_->check_index(y);
    check_level(t);
    IndexSet out;
    for (std::size_t x = 0; x < nx_; ++x)
      if (contains(x, t, y)) out.push_back(x);
    return out;
  }

  // tau -> F_tau^{-1}(y) on the ladder.
  Fibration fibration(std::size_t y) const {
    Fibration f{X_, ladder_, {}};
    f.fibres.reserve(ladder_.size());
    for (std::size_t t = 0; t < ladder_.size(); ++t) f.fibres.push_back(inverse(t, y));
    return f;
  }

  std::vector<Triple> triples() const {
    std::vector<Triple> out;
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t t = 0; t < ladder_.size(); ++t)
        for (std::size_t y = 0; y < ny_; ++y)
          if (contains(x, t, y)) out.push_back({x, t, y});
    return out;
  }

  // True iff membership is carried upward along the positive levels.
  bool is_monotone() const {
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y)
        for (std::size_t t = 1; t + 1 < ladder_.size(); ++t)
          if (contains(x, t, y) && !contains(x, t + 1, y)) return false;
    return true;
  }

  void check_level(std::size_t t) const {
    if (t >= ladder_.size())
      raise(ErrorKind::index, "ladder level index " + std::to_string(t) + " out of range");
  }

 private:
  std::size_t cell(std::size_t x, std::size_t t, std::size_t y) const {
    return (t * nx_ + x) * ny_ + y;
  }

  SpacePtr X_, Y_;
  TLadder ladder_;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<std::uint8_t> cube_;
  bool monotone_ = false;
};

// F: X => Y given by its graph.
class PlainSetValuedMap {
 public:
  PlainSetValuedMap() = default;

  PlainSetValuedMap(SpacePtr X, SpacePtr Y,
                    std::vector<std::pair<std::size_t, std::size_t>> graph)
      : X_(std::move(X)), Y_(std::move(Y)) {
    images_.assign(X_->size(), {});
    preimages_.assign(Y_->size(), {});
    for (std::size_t i = 0; i < graph.size(); ++i) {
      auto [x, y] = graph[i];
      if (x >= X_->size() || y >= Y_->size())
        raise(ErrorKind::index, "graph pair references an invalid index",
              "/plain_graph/" + std::to_string(i));
      images_[x].push_back(y);
      preimages_[y].push_back(x);
    }
    for (auto& s : images_) s = normalized(std::move(s));
    for (auto& s : preimages_) s = normalized(std::move(s));
  }

  const FiniteMetricSpace& X() const { return *X_; }
  const FiniteMetricSpace& Y() const { return *Y_; }
  const SpacePtr& X_ptr() const { return X_; }
  const SpacePtr& Y_ptr() const { return Y_; }

  const IndexSet& image(std::size_t x) const { return images_.at(x); }
  const IndexSet& preimage(std::size_t y) const { return preimages_.at(y); }

  bool contains(std::size_t x, std::size_t y) const { return nlreg::contains(images_.at(x), y); }

  // d(y, F(x)) and d(x, F^{-1}(y)).
  double image_distance(std::size_t y, std::size_t x) const {
    return point_set_distance(*Y_, y, images_.at(x));
  }
  double preimage_distance(std::size_t x, std::size_t y) const {
    return point_set_distance(*X_, x, preimages_.at(y));
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t x = 0; x < images_.size(); ++x)
      for (std::size_t y : images_[x]) out.emplace_back(x, y);
    return out;
  }

  // The inverse map Y => X.
  PlainSetValuedMap inverse() const {
    std::vector<std::pair<std::size_t, std::size_t>> g;
    for (auto [x, y] : pairs()) g.emplace_back(y, x);
    return PlainSetValuedMap(Y_, X_, std::move(g));
  }

 private:
  SpacePtr X_, Y_;
  std::vector<IndexSet> images_, preimages_;
};

// Smallest positive ladder level index t with (x,t,y) in the graph.
inline std::optional<std::size_t> delta_level(const ParamSetValuedMap& F,
                                              std::size_t y, std::size_t x) {
  F.X().check_index(x);
  F.Y().check_index(y);
  for (std::size_t t = 1; t < F.ladder().size(); ++t)
    if (F.contains(x, t, y)) return t;
  return std::nullopt;
}

// inf{t > 0 : y in F(x,t)} at ladder resolution; +inf when never reached.
inline double delta(const ParamSetValuedMap& F, std::size_t y, std::size_t x) {
  auto t = delta_level(F, y, x);
  return t ? F.ladder()[*t] : kInf;
}

inline IndexSet inverse_at_level(const ParamSetValuedMap& F, double t,
                                 std::size_t y) {
  return F.inverse(F.ladder().require_index(t), y);
}

struct OscLevelReport {
  std::size_t level = 0;
  bool holds = true;
  std::optional<std::size_t> witness;
};

struct OscVerdict {
  bool holds = true;
  std::optional<std::size_t> witness;
  // Sensitivity: the same test at each of the K smallest positive levels.
  std::vector<OscLevelReport> levels;
};

// Limsup_{tau -> 0} Phi(tau) within Phi(0), judged at the smallest positive
// level: L = {z : d(z, Phi(t_min)) <= tol} must lie in Phi(0).
inline OscVerdict outer_semicontinuity_at_zero(const Fibration& phi, int K,
                                               double tol = 1e-12) {
  if (!phi.ladder.has_positive())
    raise(ErrorKind::domain, "outer semicontinuity needs a positive ladder level");
  std::size_t positive = phi.ladder.size() - 1;
  if (K < 1 || static_cast<std::size_t>(K) > positive)
    raise(ErrorKind::domain, "resolution K must be in [1, number of positive levels]");
  const auto& X = phi.space();
  const IndexSet& zero = phi.at(0);
  OscVerdict v;
  for (int k = 1; k <= K; ++k) {
    OscLevelReport r{static_cast<std::size_t>(k), true, std::nullopt};
    const IndexSet& fib = phi.at(static_cast<std::size_t>(k));
    for (std::size_t z = 0; z < X.size() && r.holds; ++z)
      if (point_set_distance(X, z, fib) <= tol && !contains(zero, z)) {
        r.holds = false;
        r.witness = z;
      }
    v.levels.push_back(r);
  }
  v.holds = v.levels.front().holds;
  v.witness = v.levels.front().witness;
  return v;
}

inline OscVerdict outer_semicontinuity_at_zero(const ParamSetValuedMap& F,
                                               std::size_t y, int K,
                                               double tol = 1e-12) {
  return outer_semicontinuity_at_zero(F.fibration(y), K, tol);
}

// Ball extension: (x,0,y) iff y in F(x); (x,t,y) for t > 0 iff d(y,F(x)) < t
// (open) or <= t (closed). Sets the monotonicity flag.
inline ParamSetValuedMap embed_plain(const PlainSetValuedMap& F,
                                     const TLadder& ladder, bool closed,
                                     double tol = 1e-12) {
  std::size_t nx = F.X().size(), ny = F.Y().size();
  std::vector<double> d(nx * ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) d[x * ny + y] = F.image_distance(y, x);
  auto pred = [&](std::size_t x, std::size_t t, std::size_t y) {
    if (t == 0) return F.contains(x, y);
    double dist = d[x * ny + y];
    return closed ? le_tol(dist, ladder[t], tol) : lt_strict(dist, ladder[t], tol);
  };
  return ParamSetValuedMap::from_membership(F.X_ptr(), F.Y_ptr(), ladder, pred, true);
}

}  // namespace nlreg
