#pragma once

// Named checks over one instance, assembled into a deterministic report.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "conventional.hpp"
#include "io.hpp"
#include "prop41.hpp"

namespace nlreg {

struct CheckRow {
  std::string id;
  bool pass = false;
  std::string detail;
  json witnesses = json::object();
  std::map<std::string, double> margins;
};

struct Report {
  std::string command;
  NumericPolicy policy;
  std::vector<std::string> plan;
  std::vector<CheckRow> rows;  // sorted by id

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
  }

  json to_json() const {
    json checks = json::array();
    std::size_t passed = 0;
    for (const auto& r : rows) {
      json m = json::object();
      for (const auto& [k, v] : r.margins) m[k] = io::num(v);
      checks.push_back({{"id", r.id},
                        {"verdict", r.pass ? "pass" : "fail"},
                        {"detail", r.detail},
                        {"witnesses", r.witnesses},
                        {"margins", m}});
      passed += r.pass;
    }
    return {{"format", "nlreg-report"},
            {"version", kFormatVersion},
            {"run", {{"command", command}, {"seed", policy.seed}, {"policy", policy_to_json(policy)},
                     {"plan", plan}}},
            {"checks", checks},
            {"summary", {{"total", rows.size()}, {"passed", passed}, {"failed", rows.size() - passed}}}};
  }

  // One row per margin; rows without margins appear once with empty fields.
  std::string csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "id,verdict,metric,value\n";
    for (const auto& r : rows) {
      const char* v = r.pass ? "pass" : "fail";
      if (r.margins.empty()) os << r.id << ',' << v << ",,\n";
      for (const auto& [k, val] : r.margins) os << r.id << ',' << v << ',' << k << ',' << val << '\n';
    }
    return os.str();
  }
};

namespace detail {

inline json pair_json(const std::optional<std::pair<std::size_t, std::size_t>>& p) {
  if (!p) return nullptr;
  return {p->first, p->second};
}

inline void certificate_row(CheckRow& row, const Certificate& c) {
  row.pass = c.sound();
  row.detail = c.criterion + (c.hypotheses_pass() ? ": hypotheses pass" : ": hypotheses fail") +
               (c.confirmation ? ", conclusion confirmed" : ", conclusion not confirmed");
  for (const auto& h : c.hypotheses) {
    row.witnesses[h.id] = {{"pass", h.pass}, {"detail", h.detail}};
    for (const auto& [k, v] : h.data) row.witnesses[h.id][k] = io::num(v);
  }
  row.margins["target"] = c.target_value;
  row.margins["bound"] = c.bound;
}

inline CriticalTriple default_triple(const OptData& d, const Sampler& smp) {
  if (d.triple) return *d.triple;
  auto all = critical_directions(d.inst, smp);
  if (all.empty()) raise(ErrorKind::precondition, "no critical direction found at resolution");
  // Prefer a nonzero u inside T(S, xbar), where the rule is not vacuous.
  Polyhedron TS = tangent_cone(d.inst.S, d.inst.xbar, d.inst.tol).T;
  for (const auto& t : all)
    if (norm_inf(t.u) > 0 && TS.contains(t.u, d.inst.tol)) return t;
  for (const auto& t : all)
    if (TS.contains(t.u, d.inst.tol)) return t;
  return all.front();
}

inline void conv_row(CheckRow& row, const ConvVerdict& v) {
  row.pass = v.holds;
  row.detail = v.holds ? "holds" : "fails";
  row.witnesses["witness"] = v.witness;
  row.margins["lhs"] = v.lhs;
  row.margins["rhs"] = v.rhs;
  row.margins["checked"] = static_cast<double>(v.checked);
  for (const auto& w : v.warnings) row.detail += "; " + w;
}

inline void pair_row(CheckRow& row, const PairVerdict& v) {
  row.pass = v.holds;
  row.detail = v.holds ? "holds" : "fails";
  row.witnesses["witness"] = pair_json(v.witness);
  row.margins["lhs"] = v.lhs;
  row.margins["rhs"] = v.rhs;
  row.margins["checked"] = static_cast<double>(v.checked);
}

}  // namespace detail

using CheckFn = std::function<void(const InstanceFile&, const NumericPolicy&, CheckRow&)>;

inline const std::map<std::string, CheckFn>& check_registry() {
  static const std::map<std::string, CheckFn> reg = [] {
    std::map<std::string, CheckFn> r;
    r["load"] = [](const InstanceFile& f, const NumericPolicy&, CheckRow& row) {
      row.pass = true;
      row.detail = "instance valid";
      if (f.X) row.margins["|X|"] = static_cast<double>(f.X->size());
      if (f.Y) row.margins["|Y|"] = static_cast<double>(f.Y->size());
    };
    r["monotone"] = [](const InstanceFile& f, const NumericPolicy&, CheckRow& row) {
      row.pass = f.require_param().is_monotone();
      row.detail = row.pass ? "graph is monotone in t" : "graph is not monotone in t";
    };
    r["prop41_audit"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      if (!f.ladder) raise(ErrorKind::schema, "prop41_audit needs a ladder", "/ladder");
      Prop41Report rep = prop41_audit(f.require_plain(), *f.ladder, pol);
      row.pass = rep.passes();
      for (const auto& c : rep.clauses)
        row.witnesses[c.clause] = {{"status", to_string(c.status)}, {"detail", c.detail}};
      row.margins["ladder_gap"] = rep.ladder_gap;
      row.margins["max_delta_error"] = rep.max_delta_error;
      row.detail = row.pass ? "all clauses pass" : "some clause fails";
    };
    r["equivalence_audit"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      const auto& mu = f.modulus("mu");
      if (f.param) {
        EquivalenceAudit a = equivalence_audit(*f.param, f.pairs(), mu, pol);
        row.pass = a.agree && a.implication_ok;
        row.witnesses["regular"] = a.regular.holds;
        row.witnesses["open"] = a.open.holds;
        row.witnesses["strong_open"] = a.strong.holds;
        row.detail = row.pass ? "regular and open verdicts agree" : "regular and open verdicts disagree";
      } else {
        T61Audit a = equivalence_audit_T61(f.require_plain(), f.pairs(), mu, pol, std::nullopt, f.nu);
        row.pass = a.agree;
        row.witnesses["regular"] = a.regular.holds;
        row.witnesses["open"] = a.open.holds;
        row.witnesses["inverse_holder"] = a.inverse_holder.holds;
        row.detail = row.pass ? "three verdicts agree" : "verdicts disagree";
      }
    };
    r["t61_audit"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      const auto& F = f.require_plain();
      std::optional<std::pair<std::size_t, std::size_t>> pt;
      if (F.contains(f.query.xbar, f.query.ybar)) pt = std::make_pair(f.query.xbar, f.query.ybar);
      T61Audit a = equivalence_audit_T61(F, f.pairs(), f.modulus("mu"), pol, pt, f.nu);
      row.pass = a.agree && a.point_agree && a.weak_implied && a.weak_agree;
      row.witnesses["regular"] = a.regular.holds;
      row.witnesses["open"] = a.open.holds;
      row.witnesses["inverse_holder"] = a.inverse_holder.holds;
      if (pt) {
        row.witnesses["point"] = {pt->first, pt->second};
        row.witnesses["regular_at"] = a.regular_at->holds;
        row.witnesses["part_iii"] = a.part_iii;
      }
      row.detail = row.pass ? "equivalences confirmed" : "equivalence broken";
    };
    r["regular"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      detail::pair_row(row, check_regular_on_W(f.require_param(), f.pairs(), f.modulus("mu"), pol));
    };
    r["open"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      detail::pair_row(row, check_open_on_W(f.require_param(), f.pairs(), f.modulus("mu"), pol));
    };
    r["nu_regular"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      if (!f.nu) raise(ErrorKind::schema, "nu_regular needs a nu table", "/nu");
      NuRegularity v = check_nu_regular_on_W(f.require_param(), f.pairs(), f.modulus("mu"), *f.nu, pol);
      detail::pair_row(row, v.verdict);
      row.margins["reduced"] = static_cast<double>(v.reduced.size());
    };
    r["local"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      LocalRegularity v =
          check_local_regularity(f.require_param(), f.query.xbar, f.query.ybar, f.modulus("mu"), pol);
      row.pass = v.holds;
      row.detail = v.verdict;
      row.margins["r_U"] = v.r_U;
      row.margins["r_V"] = v.r_V;
    };
    r["conv_regular"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      RegularityQuery q{&f.require_plain(), f.pairs(), f.modulus("mu"), f.nu,
                        f.nu ? QueryMode::nu_regular : QueryMode::regular, 0, 0};
      detail::conv_row(row, check_metric_regularity(q, pol));
    };
    r["conv_open"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      RegularityQuery q{&f.require_plain(), f.pairs(), f.modulus("mu"), f.nu,
                        f.nu ? QueryMode::nu_open : QueryMode::open, 0, 0};
      detail::conv_row(row, check_openness(q, pol));
    };
    r["conv_holder"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      RegularityQuery q{&f.require_plain(), f.pairs(), f.modulus("mu"), f.nu,
                        f.nu ? QueryMode::nu_holder : QueryMode::holder, 0, 0};
      detail::conv_row(row, check_holder(q, pol));
    };
    r["t64"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      detail::certificate_row(row, certify_T64(f.require_plain(), f.pairs(), f.modulus("mu"), pol));
    };
    r["modulus_fit"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      ModulusFit fit = estimate_best_modulus(f.require_plain(), f.pairs(), f.query.k, pol);
      row.margins["lambda"] = fit.lambda;
      row.margins["k"] = fit.k;
      row.witnesses["argmax"] = detail::pair_json(fit.argmax);
      row.pass = std::isfinite(fit.lambda);
      if (auto* kt = io::maybe(f.meta, "kappa_true")) {
        double kappa = io::as_double(*kt, "/meta/kappa_true");
        row.margins["kappa_true"] = kappa;
        row.pass = row.pass && fit.lambda <= kappa;
      }
      row.detail = row.pass ? "finite best modulus" : "no admissible power modulus";
    };
    r["induct"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      const auto& F = f.require_param();
      Fibration phi = F.fibration(f.query.y);
      IterationTrace tr = run_induction(phi, f.query.t, f.query.x, f.sequence("a"), f.sequence("b"), pol, f.query.U);
      row.pass = tr.status == TraceStatus::certified;
      row.detail = to_string(tr.status);
      if (!tr.failed_condition.empty()) row.detail += ": " + tr.failed_condition;
      if (tr.witness) row.witnesses["z"] = *tr.witness;
      row.margins["distance"] = tr.distance;
      row.margins["bound"] = tr.bound;
      row.margins["steps"] = static_cast<double>(tr.steps.size());
    };
    auto certify = [](FreeTCriterion which) {
      return [which](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
        const auto& F = f.require_param();
        AuxScheme s = f.scheme();
        const FunctionalModulus* mu = f.moduli.count("mu") ? &f.modulus("mu") : nullptr;
        Certificate c;
        switch (which) {
          case FreeTCriterion::khanh_plus:
            c = certify_khanh_plus(F, f.query.x, f.query.t, f.query.y, s, pol, mu);
            break;
          case FreeTCriterion::khanh4_plus:
            c = certify_khanh4_plus(F, f.query.x, f.query.t, f.query.y, s, mu, pol);
            break;
          case FreeTCriterion::image:
            c = certify_image_space(F, f.query.x, f.query.t, f.query.y, s, mu, pol);
            break;
          case FreeTCriterion::decrease:
            c = certify_decrease(F, f.query.x, f.query.t, f.query.y, f.modulus("mu"), pol);
            break;
        }
        detail::certificate_row(row, c);
      };
    };
    r["certify_khanh+"] = certify(FreeTCriterion::khanh_plus);
    r["certify_khanh4+"] = certify(FreeTCriterion::khanh4_plus);
    r["certify_image"] = certify(FreeTCriterion::image);
    r["certify_decrease"] = certify(FreeTCriterion::decrease);
    r["certify_free-t"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      detail::certificate_row(row, free_t_estimate(f.require_param(), f.query.x, f.query.y,
                                                   FreeTCriterion::decrease, f.scheme(),
                                                   f.modulus("mu"), pol));
    };
    r["ekeland"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      EVPInstance in = f.evp_instance();
      EVPResult res = evp_solve(in, pol);
      EVPVerdict v = evp_verify(in, res.z, pol);
      EVPTraceAudit a = evp_audit_trace(in, res, pol);
      row.pass = v.all() && a.all();
      if (in.space->size() <= pol.oracle_cap) {
        bool member = contains(evp_oracle(in, pol), res.z);
        row.witnesses["in_oracle_set"] = member;
        row.pass = row.pass && member;
      }
      row.witnesses["z"] = res.z;
      row.witnesses["i"] = v.i;
      row.witnesses["ii"] = v.ii;
      row.witnesses["iii"] = v.iii;
      row.witnesses["trace"] = {{"halving", a.halving}, {"monotone", a.monotone},
                                {"path_bound", a.path_bound}, {"length_bound", a.length_bound},
                                {"half_sup", a.half_sup}};
      row.margins["distance"] = v.distance;
      row.margins["worst_margin"] = v.worst_margin;
      row.margins["path_length"] = res.path_length;
      row.margins["steps"] = static_cast<double>(res.trace.size());
      row.detail = row.pass ? "z verified" : "verification failed";
    };
    r["optcond_multipliers"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      if (!f.opt) raise(ErrorKind::schema, "instance has no optcond section", "/optcond");
      Sampler smp;
      smp.seed = pol.seed;
      CriticalTriple t = detail::default_triple(*f.opt, smp);
      MultiplierSearch s = find_multipliers(f.opt->inst, t, smp);
      row.witnesses["u"] = io::vec(t.u);
      row.witnesses["interior_hypothesis"] = s.interior_hypothesis;
      if (!s.mult) {
        row.pass = false;
        row.detail = s.note;
        return;
      }
      Sampler fresh = smp;
      fresh.count = 4 * smp.count;
      fresh.seed = smp.seed + 1;
      MultiplierVerdict v = check_multiplier_rule(f.opt->inst, t, *s.mult, fresh);
      row.pass = v.holds;
      row.witnesses["multipliers"] = io::vec(s.mult->flat());
      row.margins["margin"] = v.margin;
      row.margins["rhs"] = v.rhs;
      row.margins["samples"] = static_cast<double>(v.samples);
      row.detail = v.holds ? "multiplier rule holds on the fresh sample" : "multiplier rule fails";
      if (!v.note.empty()) row.detail += "; " + v.note;
    };
    r["optcond_cq"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      if (!f.opt) raise(ErrorKind::schema, "instance has no optcond section", "/optcond");
      Sampler smp;
      smp.seed = pol.seed;
      CriticalTriple t = detail::default_triple(*f.opt, smp);
      CQVerdict v = check_cq(f.opt->inst, t, smp);
      row.pass = v.holds;
      row.detail = v.holds ? "constraint qualification holds" : v.note;
      if (v.deficiency) row.witnesses["deficiency"] = io::vec(*v.deficiency);
    };
    r["optcond_claim2"] = [](const InstanceFile& f, const NumericPolicy& pol, CheckRow& row) {
      if (!f.opt) raise(ErrorKind::schema, "instance has no optcond section", "/optcond");
      Sampler smp;
      smp.seed = pol.seed;
      CriticalTriple t = detail::default_triple(*f.opt, smp);
      Claim2Verdict v = check_claim2(f.opt->inst, t, BallExtension{f.opt->scale}, f.modulus(f.opt->mu),
                                     f.opt->theta, smp);
      row.pass = v.holds && !v.vacuous();
      row.margins["confirmed"] = static_cast<double>(v.confirmed);
      row.margins["skipped"] = static_cast<double>(v.skipped);
      row.margins["failed"] = static_cast<double>(v.failed);
      row.detail = !v.holds ? "construction failed"
                   : v.vacuous() ? "no usable sample at resolution"
                                 : "construction confirmed on every usable sample";
    };
    return r;
  }();
  return reg;
}

// Runs the plan in order; a failing or throwing check is recorded and the
// run continues. Unknown names are rejected before anything runs.
inline Report run_experiment(const InstanceFile& f, const std::vector<std::string>& plan,
                             const NumericPolicy& pol, const std::string& command = "run") {
  const auto& reg = check_registry();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!reg.count(plan[i])) raise(ErrorKind::schema, "unknown check \"" + plan[i] + "\"", io::ptr("/plan", i));
    if (!seen.insert(plan[i]).second)
      raise(ErrorKind::schema, "check \"" + plan[i] + "\" appears twice", io::ptr("/plan", i));
  }
  Report rep;
  rep.command = command;
  rep.policy = pol;
  rep.plan = plan;
  for (const auto& name : plan) {
    CheckRow row;
    row.id = name;
    try {
      reg.at(name)(f, pol, row);
    } catch (const Error& e) {
      row.pass = false;
      row.detail = e.what();
    }
    rep.rows.push_back(std::move(row));
  }
  std::sort(rep.rows.begin(), rep.rows.end(), [](const CheckRow& a, const CheckRow& b) { return a.id < b.id; });
  return rep;
}

}  // namespace nlreg
