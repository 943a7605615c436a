#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"

namespace nlreg {

enum class FnKind { linear, power, constant, table_step, table_linear };

inline const char* to_string(FnKind k) {
  switch (k) {
    case FnKind::linear: return "linear";
    case FnKind::power: return "power";
    case FnKind::constant: return "constant";
    case FnKind::table_step: return "table_step";
    case FnKind::table_linear: return "table_linear";
  }
  return "?";
}

// Scalar function on [0, inf]. Serves as a functional modulus mu and as the
// auxiliary functions b, m of the covering schemes. Value at +inf is +inf.
//   linear:   c t
//   power:    lambda t^k
//   constant: c
//   table:    breakpoints s_0 = 0 < s_1 < ..., right-continuous step or
//             linear interpolation; the step form is constant after the
//             last breakpoint, the linear form keeps its last slope
class ScalarFunction {
 public:
  ScalarFunction() = default;

  static ScalarFunction linear(double c) {
    if (!(c > 0) || !std::isfinite(c)) raise(ErrorKind::modulus, "linear coefficient must be > 0");
    ScalarFunction f;
    f.kind_ = FnKind::linear;
    f.a_ = c;
    return f;
  }

  static ScalarFunction power(double lambda, double k) {
    if (!(lambda > 0) || !(k > 0) || !std::isfinite(lambda) || !std::isfinite(k))
      raise(ErrorKind::modulus, "power modulus needs lambda > 0 and k > 0");
    ScalarFunction f;
    f.kind_ = FnKind::power;
    f.a_ = lambda;
    f.k_ = k;
    return f;
  }

  static ScalarFunction constant(double c) {
    if (!(c >= 0) || !std::isfinite(c)) raise(ErrorKind::modulus, "constant must be finite and >= 0");
    ScalarFunction f;
    f.kind_ = FnKind::constant;
    f.a_ = c;
    return f;
  }

  static ScalarFunction table(std::vector<double> s, std::vector<double> v, bool step) {
    if (s.empty() || s.size() != v.size())
      raise(ErrorKind::modulus, "table needs matching nonempty breakpoints and values");
    if (s.front() != 0) raise(ErrorKind::modulus, "first breakpoint must be 0");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!std::isfinite(s[i]) || !std::isfinite(v[i]) || v[i] < 0)
        raise(ErrorKind::modulus, "table entries must be finite, values >= 0");
      if (i > 0 && !(s[i] > s[i - 1]))
        raise(ErrorKind::modulus, "breakpoints must be strictly increasing");
    }
    ScalarFunction f;
    f.kind_ = step ? FnKind::table_step : FnKind::table_linear;
    f.s_ = std::move(s);
    f.v_ = std::move(v);
    return f;
  }

  FnKind kind() const { return kind_; }
  double coefficient() const { return a_; }
  double exponent() const { return kind_ == FnKind::power ? k_ : (kind_ == FnKind::linear ? 1.0 : 0.0); }
  const std::vector<double>& breakpoints() const { return s_; }
  const std::vector<double>& values() const { return v_; }

  double operator()(double t) const {
    if (std::isinf(t)) return kInf;
    switch (kind_) {
      case FnKind::linear: return a_ * t;
      case FnKind::power: return a_ * std::pow(t, k_);
      case FnKind::constant: return a_;
      case FnKind::table_step: {
        auto it = std::upper_bound(s_.begin(), s_.end(), t);
        std::size_t i = static_cast<std::size_t>(it - s_.begin());
        return v_[i == 0 ? 0 : i - 1];
      }
      case FnKind::table_linear: {
        if (v_.size() == 1) return v_.front();
        if (t >= s_.back()) {
          std::size_t n = v_.size();
          double slope = (v_[n - 1] - v_[n - 2]) / (s_[n - 1] - s_[n - 2]);
          return v_.back() + std::max(slope, 0.0) * (t - s_.back());
        }
        auto it = std::upper_bound(s_.begin(), s_.end(), t);
        std::size_t i = static_cast<std::size_t>(it - s_.begin());
        if (i == 0) return v_.front();
        double w = (t - s_[i - 1]) / (s_[i] - s_[i - 1]);
        return v_[i - 1] + w * (v_[i] - v_[i - 1]);
      }
    }
    return kInf;
  }

  bool nonstandard() const { return kind_ == FnKind::power && k_ > 1; }

  bool nondecreasing() const {
    if (kind_ == FnKind::table_step || kind_ == FnKind::table_linear)
      for (std::size_t i = 1; i < v_.size(); ++i)
        if (v_[i] < v_[i - 1]) return false;
    return true;
  }

  bool strictly_increasing() const {
    switch (kind_) {
      case FnKind::linear:
      case FnKind::power: return true;
      case FnKind::constant:
      case FnKind::table_step: return false;
      case FnKind::table_linear:
        if (v_.size() < 2) return false;
        for (std::size_t i = 1; i < v_.size(); ++i)
          if (!(v_[i] > v_[i - 1])) return false;
        return true;
    }
    return false;
  }

  bool continuous() const { return kind_ != FnKind::table_step || v_.size() == 1; }

  double at_zero() const { return (*this)(0.0); }

  // lim_{t -> 0+} f(t) = 0.
  bool tends_to_zero() const {
    switch (kind_) {
      case FnKind::linear:
      case FnKind::power: return true;
      case FnKind::constant: return a_ == 0;
      case FnKind::table_step:
      case FnKind::table_linear: return v_.front() == 0;
    }
    return false;
  }

  // f(t) > 0 for every t > 0.
  bool positive_off_zero() const {
    switch (kind_) {
      case FnKind::linear:
      case FnKind::power: return true;
      case FnKind::constant: return a_ > 0;
      case FnKind::table_step: return v_.front() > 0;
      case FnKind::table_linear:
        if (v_.size() == 1) return v_.front() > 0;
        return std::all_of(v_.begin() + 1, v_.end(), [](double x) { return x > 0; });
    }
    return false;
  }

  // Continuous, f(0) = 0 and f(t) > 0 for t > 0.
  bool vanishes_only_at_zero() const {
    return continuous() && at_zero() == 0 && positive_off_zero();
  }

  // limsup_{t -> 0+} f(t)/t.
  double limsup_ratio_at_zero() const {
    switch (kind_) {
      case FnKind::linear: return a_;
      case FnKind::power: return k_ > 1 ? 0.0 : (k_ == 1 ? a_ : kInf);
      case FnKind::constant: return a_ == 0 ? 0.0 : kInf;
      case FnKind::table_step: return v_.front() == 0 ? 0.0 : kInf;
      case FnKind::table_linear:
        if (v_.front() != 0) return kInf;
        return v_.size() > 1 ? (v_[1] - v_[0]) / s_[1] : 0.0;
    }
    return kInf;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case FnKind::linear: os << a_ << "*t"; break;
      case FnKind::power: os << a_ << "*t^" << k_; break;
      case FnKind::constant: os << a_; break;
      case FnKind::table_step:
      case FnKind::table_linear:
        os << to_string(kind_) << "[" << s_.size() << " breakpoints]";
        break;
    }
    return os.str();
  }

 private:
  FnKind kind_ = FnKind::linear;
  double a_ = 1;
  double k_ = 1;
  std::vector<double> s_, v_;
};

// A functional modulus: nondecreasing and upper semicontinuous on [0, inf].
using FunctionalModulus = ScalarFunction;

inline void validate_modulus(const FunctionalModulus& mu) {
  if (!mu.nondecreasing()) raise(ErrorKind::modulus, "modulus must be nondecreasing");
}

// Admissible for the decrease criteria: continuous, zero exactly at 0.
inline void require_decrease_modulus(const FunctionalModulus& mu) {
  validate_modulus(mu);
  if (!mu.continuous()) raise(ErrorKind::modulus, "modulus must be continuous");
  if (!mu.vanishes_only_at_zero())
    raise(ErrorKind::modulus, "modulus must vanish exactly at 0");
}

}  // namespace nlreg
