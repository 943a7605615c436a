#pragma once

#include <map>
#include <string>
#include <vector>

#include "numeric.hpp"

namespace nlreg {

struct HypothesisCheck {
  std::string id;
  bool pass = true;
  std::string detail;
  std::map<std::string, double> data;  // witnesses and margins, by name
};

// A checked criterion. The confirmation is computed directly from the
// instance and runs whether or not the hypotheses pass.
struct Certificate {
  std::string criterion;
  std::vector<HypothesisCheck> hypotheses;
  std::string target;        // e.g. "d(x,F0^-1(y))"
  double target_value = kInf;
  double bound = kInf;
  bool strict = true;        // conclusion is target < bound (else <=)
  bool confirmation = false;
  bool vacuous = false;
  std::vector<std::string> notes;

  bool hypotheses_pass() const {
    for (const auto& h : hypotheses)
      if (!h.pass) return false;
    return true;
  }
  bool sound() const { return hypotheses_pass() && confirmation; }
  // Hypotheses hold but the concluded inequality does not: a bug.
  bool false_certificate() const { return hypotheses_pass() && !confirmation; }

  HypothesisCheck& add(std::string id, bool pass, std::string detail = {}) {
    hypotheses.push_back({std::move(id), pass, std::move(detail), {}});
    return hypotheses.back();
  }
  const HypothesisCheck* find(const std::string& id) const {
    for (const auto& h : hypotheses)
      if (h.id == id) return &h;
    return nullptr;
  }
};

}  // namespace nlreg
