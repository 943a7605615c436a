#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace nlreg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One record shared by every module so that strict inequalities mean the
// same thing everywhere.
struct NumericPolicy {
  double tol_strict = 1e-12;
  int horizon = 64;
  std::uint64_t seed = 0;
  std::size_t oracle_cap = 10000;
  // Number of smallest positive ladder levels reported by the
  // outer-semicontinuity check.
  int osc_resolution = 1;
  // Triangle-inequality slack for explicit distance matrices.
  double matrix_tol = 1e-9;
};

// a < b evaluated as a < b - tol. IEEE infinity makes inf < inf false and
// finite < inf true, which is the absorbing semantics we want.
inline bool lt_strict(double a, double b, double tol) { return a < b - tol; }

// a <= b evaluated as a <= b + tol; inf <= inf holds.
inline bool le_tol(double a, double b, double tol) { return a <= b + tol; }

inline bool is_finite(double v) { return std::isfinite(v); }

}  // namespace nlreg
