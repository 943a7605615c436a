#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "metric_space.hpp"
#include "numeric.hpp"
#include "svmap.hpp"

namespace nlreg {

enum class ClauseStatus { pass, fail, not_applicable };

inline const char* to_string(ClauseStatus s) {
  switch (s) {
    case ClauseStatus::pass: return "pass";
    case ClauseStatus::fail: return "fail";
    case ClauseStatus::not_applicable: return "not_applicable";
  }
  return "?";
}

struct ClauseResult {
  std::string clause;
  ClauseStatus status = ClauseStatus::pass;
  std::string detail;
};

struct Prop41Report {
  std::vector<ClauseResult> clauses;
  double ladder_gap = 0;
  double max_delta_error = 0;        // clause (ii), open and closed embeddings
  std::size_t exact_matches = 0;     // closed embedding, d on the ladder

  bool passes() const {
    return std::all_of(clauses.begin(), clauses.end(),
                       [](const ClauseResult& c) { return c.status != ClauseStatus::fail; });
  }
  const ClauseResult* find(const std::string& id) const {
    for (const auto& c : clauses)
      if (c.clause == id) return &c;
    return nullptr;
  }
};

// Exhaustive audit of the relations between a plain map F and its open and
// closed ball embeddings on the given ladder.
inline Prop41Report prop41_audit(const PlainSetValuedMap& F, const TLadder& ladder,
                                 const NumericPolicy& pol) {
  const double tol = pol.tol_strict;
  ParamSetValuedMap Fo = embed_plain(F, ladder, false, tol);
  ParamSetValuedMap Fc = embed_plain(F, ladder, true, tol);
  const auto& X = F.X();
  const auto& Y = F.Y();
  const std::size_t nx = X.size(), ny = Y.size(), nl = ladder.size();
  Prop41Report rep;
  rep.ladder_gap = ladder.max_gap();

  auto fail = [](ClauseResult& c, std::string why) {
    if (c.status == ClauseStatus::fail) return;
    c.status = ClauseStatus::fail;
    c.detail = std::move(why);
  };
  auto pair_str = [](std::size_t a, std::size_t b) {
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
  };

  ClauseResult c1{"i", ClauseStatus::pass, "F_0 = F for both embeddings"};
  for (std::size_t x = 0; x < nx; ++x)
    if (Fo.image(x, 0) != F.image(x) || Fc.image(x, 0) != F.image(x))
      fail(c1, "level-0 image differs at x=" + std::to_string(x));

  ClauseResult c2{"ii", ClauseStatus::pass, "|delta - d(y,F(x))| within one ladder gap"};
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      double d = F.image_distance(y, x);
      for (const ParamSetValuedMap* E : {&Fo, &Fc}) {
        double dl = delta(*E, y, x);
        double err = std::isinf(d) && std::isinf(dl) ? 0.0 : std::abs(dl - d);
        if (std::isnan(err)) err = kInf;
        rep.max_delta_error = std::max(rep.max_delta_error, err);
        if (err > rep.ladder_gap + tol)
          fail(c2, "pair " + pair_str(x, y) + " off by " + std::to_string(err) +
                       (d >= ladder.top() ? " (distance beyond the ladder top)" : ""));
      }
      // Closed embedding is exact whenever d is a positive ladder level.
      if (d > 0 && std::isfinite(d)) {
        if (auto k = ladder.index_of(d, tol)) {
          if (std::abs(delta(Fc, y, x) - ladder[*k]) > 0)
            fail(c2, "closed embedding not exact at " + pair_str(x, y));
          else
            ++rep.exact_matches;
        }
      }
    }

  // Clauses (iii), (iv), (vi): per y, grow the balls around y level by level.
  ClauseResult c3{"iii", ClauseStatus::pass, "F0^-1(B(y,t)) = F^-1(B(y,t)) = F_t^-1(y)"};
  ClauseResult c4{"iv", ClauseStatus::pass, "closed: F0^-1(B[y,t]) = F^-1(B[y,t]) within F_t^-1(y)"};
  ClauseResult c6{"vi", ClauseStatus::pass, "set1 holds for both embeddings"};
  std::vector<IndexSet> pre_o(ny), pre_c(ny);
  for (std::size_t v = 0; v < ny; ++v) {
    pre_o[v] = Fo.inverse(0, v);
    pre_c[v] = Fc.inverse(0, v);
  }
  for (std::size_t y = 0; y < ny; ++y) {
    std::vector<std::size_t> order(ny);
    for (std::size_t v = 0; v < ny; ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return Y(y, a) < Y(y, b); });
    std::vector<char> A_open(nx, 0), B_open(nx, 0), A_closed(nx, 0), B_closed(nx, 0);
    std::size_t po = 0, pc = 0;  // prefix of order inside the open / closed ball
    for (std::size_t k = 0; k < nl; ++k) {
      double t = ladder[k];
      auto absorb = [&](std::size_t& p, bool closed, std::vector<char>& A,
                        std::vector<char>& B, const std::vector<IndexSet>& pre) {
        while (p < ny) {
          std::size_t v = order[p];
          double d = Y(y, v);
          bool in = (k == 0) ? v == y || (closed && d <= tol)
                             : (closed ? le_tol(d, t, tol) : lt_strict(d, t, tol));
          if (!in) break;
          for (std::size_t x : pre[v]) A[x] = 1;
          for (std::size_t x : F.preimage(v)) B[x] = 1;
          ++p;
        }
      };
      absorb(po, false, A_open, B_open, pre_o);
      absorb(pc, true, A_closed, B_closed, pre_c);
      IndexSet at_o = Fo.inverse(k, y), at_c = Fc.inverse(k, y);
      std::vector<char> mo(nx, 0), mc(nx, 0);
      for (std::size_t x : at_o) mo[x] = 1;
      for (std::size_t x : at_c) mc[x] = 1;
      for (std::size_t x = 0; x < nx; ++x) {
        std::string where = " at y=" + std::to_string(y) + " t=" + std::to_string(t) +
                            " x=" + std::to_string(x);
        if (A_open[x] != B_open[x] || A_open[x] != mo[x]) fail(c3, "mismatch" + where);
        if (A_closed[x] != B_closed[x] || (A_closed[x] && !mc[x])) fail(c4, "mismatch" + where);
        if (k > 0 && ((A_open[x] && !mo[x]))) fail(c6, "open embedding" + where);
      }
      if (k > 0) {
        // set1 for the closed embedding uses the open ball B(y,t).
        for (std::size_t x = 0; x < nx; ++x)
          if (A_open[x] && !mc[x]) fail(c6, "closed embedding at y=" + std::to_string(y));
      }
    }
  }
  ClauseResult c7{"vii", ClauseStatus::not_applicable,
                  "upper semicontinuity hypothesis is vacuous on a finite space"};
  rep.clauses = {c1, c2, c3, c4, c6, c7};
  return rep;
}

}  // namespace nlreg
