// Command-line front end. Exit codes: 0 pass, 1 check failure, 2 input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlreg/experiment.hpp"
#include "nlreg/generate.hpp"
#include "nlreg/io.hpp"
#include "nlreg/nlreg.hpp"

using namespace nlreg;

namespace {

struct Globals {
  std::optional<double> tol;
  std::optional<int> horizon;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool validate = false;
};

// flag > file > default
NumericPolicy effective_policy(const Globals& g, NumericPolicy p) {
  if (g.tol) p.tol_strict = *g.tol;
  if (g.horizon) p.horizon = *g.horizon;
  if (g.seed) p.seed = *g.seed;
  return p;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) raise(ErrorKind::parse, "cannot write " + g.out);
  f << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(ErrorKind::parse, "cannot write " + path);
  f << text;
}

json certificate_json(const Certificate& c) {
  json hs = json::array();
  for (const auto& h : c.hypotheses) {
    json d = json::object();
    for (const auto& [k, v] : h.data) d[k] = io::num(v);
    hs.push_back({{"id", h.id}, {"pass", h.pass}, {"detail", h.detail}, {"data", d}});
  }
  return {{"criterion", c.criterion},
          {"hypotheses", hs},
          {"hypotheses_pass", c.hypotheses_pass()},
          {"target", c.target},
          {"target_value", io::num(c.target_value)},
          {"bound", io::num(c.bound)},
          {"strict", c.strict},
          {"confirmation", c.confirmation},
          {"vacuous", c.vacuous},
          {"notes", c.notes}};
}

json conv_json(const ConvVerdict& v) {
  json j = {{"holds", v.holds},
            {"witness", v.witness},
            {"lhs", io::num(v.lhs)},
            {"rhs", io::num(v.rhs)},
            {"checked", v.checked},
            {"excluded", v.excluded},
            {"warnings", v.warnings}};
  if (v.local) {
    json fr = json::array();
    for (auto [a, b] : v.local->frontier) fr.push_back({io::num(a), io::num(b)});
    j["local"] = {{"holds", v.local->holds}, {"verdict", v.local->verdict}, {"frontier", fr},
                  {"r_U", io::num(v.local->r_U)}, {"r_V", io::num(v.local->r_V)}};
  }
  return j;
}

json pair_verdict_json(const PairVerdict& v) {
  return {{"holds", v.holds},
          {"witness", v.witness ? json{v.witness->first, v.witness->second} : json(nullptr)},
          {"lhs", io::num(v.lhs)},
          {"rhs", io::num(v.rhs)},
          {"checked", v.checked}};
}

json polyhedron_json(const Polyhedron& P) {
  json j = polyhedron_to_json(P);
  j["strict"] = P.strict;
  return j;
}

// Prints the verdict line on stderr so stdout stays machine-readable.
int verdict(bool pass, const std::string& line) {
  std::cerr << (pass ? "PASS " : "FAIL ") << line << "\n";
  return pass ? 0 : 1;
}

int cmd_load(const Globals& g, const std::string& path) {
  InstanceFile f = load_instance(path);
  NumericPolicy pol = effective_policy(g, f.policy);
  json j = {{"version", f.version}, {"policy", policy_to_json(pol)}};
  if (f.X) j["X"] = {{"size", f.X->size()}, {"metric", to_string(f.X->metric())}};
  if (f.Y) j["Y"] = {{"size", f.Y->size()}, {"metric", to_string(f.Y->metric())}};
  if (f.ladder) j["ladder_levels"] = f.ladder->size();
  if (f.param) j["param_map"] = {{"triples", f.param->triples().size()}, {"monotone", f.param->monotone()}};
  if (f.plain) j["plain_map"] = {{"pairs", f.plain->pairs().size()}, {"embed", f.embed}};
  if (f.W) j["W"] = f.W->size();
  json names = json::array();
  for (const auto& [k, v] : f.moduli) names.push_back(k);
  j["moduli"] = names;
  j["evp"] = f.evp.has_value();
  j["optcond"] = f.opt.has_value();
  j["plan"] = f.plan;
  emit(g, dump(j));
  return verdict(true, "instance valid");
}

int cmd_gen(const Globals& g, const std::string& kind, std::size_t size) {
  std::uint64_t seed = g.seed.value_or(0);
  json j = generate_instance(parse_gen_kind(kind), size, seed);
  parse_instance(j);  // generated files must load
  emit(g, dump(j));
  return 0;
}

int cmd_induct(const Globals& g, const std::string& path, std::optional<std::size_t> x,
               std::optional<double> t, std::optional<std::size_t> y, const std::string& a_name,
               const std::string& b_name) {
  InstanceFile f = load_instance(path);
  NumericPolicy pol = effective_policy(g, f.policy);
  const auto& F = f.require_param();
  const std::size_t qx = x.value_or(f.query.x), qy = y.value_or(f.query.y);
  const double qt = t.value_or(f.query.t);
  F.Y().check_index(qy);
  Fibration phi = F.fibration(qy);
  const auto& a = f.sequence(a_name);
  const auto& b = f.sequence(b_name);
  PreconditionReport pre = verify_preconditions(phi, qt, qx, a, b, pol, f.query.U);
  IterationTrace tr = run_induction(phi, qt, qx, a, b, pol, f.query.U);
  json steps = json::array();
  for (const auto& s : tr.steps)
    steps.push_back({{"n", s.n}, {"a_n", io::num(s.a_n)}, {"level", io::num(s.level)}, {"x_n", s.x_n},
                     {"b_n", io::num(s.b_n)}, {"next", s.next}, {"candidates", s.candidates},
                     {"snapped", s.snapped}, {"terminal", s.terminal}});
  json j = {{"preconditions",
             {{"A2", pre.a2}, {"A3", pre.a3}, {"A4", pre.a4}, {"sum_b", io::num(pre.sum_b)},
              {"a2_detail", pre.a2_detail},
              {"a3_fail_n", pre.a3_fail_n ? json(*pre.a3_fail_n) : json(nullptr)},
              {"a3_witness", pre.a3_witness ? json(*pre.a3_witness) : json(nullptr)},
              {"osc_holds", pre.osc.holds}}},
            {"status", to_string(tr.status)},
            {"failed_condition", tr.failed_condition},
            {"failed_at", tr.failed_at},
            {"witness", tr.witness ? json(*tr.witness) : json(nullptr)},
            {"distance", io::num(tr.distance)},
            {"bound", io::num(tr.bound)},
            {"note", tr.note},
            {"steps", steps}};
  emit(g, dump(j));
  std::ostringstream line;
  line << "induct: " << to_string(tr.status);
  if (tr.witness) line << " z=" << *tr.witness << " d(x,z)=" << tr.distance << " bound=" << tr.bound;
  else if (!tr.failed_condition.empty()) line << " (" << tr.failed_condition << ")";
  return verdict(tr.status == TraceStatus::certified, line.str());
}

int cmd_certify(const Globals& g, const std::string& path, const std::string& criterion,
                const std::string& scheme, const std::string& via, std::optional<std::size_t> x,
                std::optional<double> t, std::optional<std::size_t> y) {
  InstanceFile f = load_instance(path);
  NumericPolicy pol = effective_policy(g, f.policy);
  const auto& F = f.require_param();
  const std::size_t qx = x.value_or(f.query.x), qy = y.value_or(f.query.y);
  const double qt = t.value_or(f.query.t);
  AuxScheme s = f.scheme(scheme);
  const FunctionalModulus* mu = f.moduli.count("mu") ? &f.modulus("mu") : nullptr;
  Certificate c;
  if (criterion == "khanh+") c = certify_khanh_plus(F, qx, qt, qy, s, pol, mu);
  else if (criterion == "khanh4+") c = certify_khanh4_plus(F, qx, qt, qy, s, mu, pol);
  else if (criterion == "image") c = certify_image_space(F, qx, qt, qy, s, mu, pol);
  else if (criterion == "decrease") c = certify_decrease(F, qx, qt, qy, f.modulus("mu"), pol);
  else if (criterion == "free-t") {
    FreeTCriterion w = via == "khanh+"    ? FreeTCriterion::khanh_plus
                       : via == "khanh4+" ? FreeTCriterion::khanh4_plus
                       : via == "image"   ? FreeTCriterion::image
                                          : FreeTCriterion::decrease;
    c = free_t_estimate(F, qx, qy, w, s, f.modulus("mu"), pol);
  } else {
    raise(ErrorKind::schema, "unknown criterion \"" + criterion + "\"");
  }
  emit(g, dump(certificate_json(c)));
  std::ostringstream line;
  line << "certify " << c.criterion << ": hypotheses " << (c.hypotheses_pass() ? "pass" : "fail")
       << ", " << c.target << " = " << c.target_value << (c.strict ? " < " : " <= ") << c.bound
       << (c.confirmation ? " confirmed" : " not confirmed");
  if (c.false_certificate()) line << " (FALSE CERTIFICATE)";
  return verdict(c.sound(), line.str());
}

int cmd_regcheck(const Globals& g, const std::string& path, const std::string& property,
                 const std::string& setting, const std::string& csv_path) {
  InstanceFile f = load_instance(path);
  NumericPolicy pol = effective_policy(g, f.policy);
  const auto& mu = f.modulus("mu");
  json j;
  bool pass = false;
  if (setting == "param") {
    const auto& F = f.require_param();
    if (property == "regular") {
      auto v = check_regular_on_W(F, f.pairs(), mu, pol);
      j = pair_verdict_json(v);
      pass = v.holds;
    } else if (property == "open") {
      auto v = check_open_on_W(F, f.pairs(), mu, pol);
      j = pair_verdict_json(v);
      pass = v.holds;
    } else if (property == "strong-open") {
      auto v = check_open_strong_on_W(F, f.pairs(), mu, pol);
      j = pair_verdict_json(v);
      pass = v.holds;
    } else if (property == "nu-regular") {
      if (!f.nu) raise(ErrorKind::schema, "nu-regular needs a nu table", "/nu");
      auto v = check_nu_regular_on_W(F, f.pairs(), mu, *f.nu, pol);
      j = pair_verdict_json(v.verdict);
      j["reduced"] = v.reduced.size();
      pass = v.verdict.holds;
    } else if (property == "local") {
      auto v = check_local_regularity(F, f.query.xbar, f.query.ybar, mu, pol);
      json fr = json::array();
      for (auto [a, b] : v.frontier) fr.push_back({io::num(a), io::num(b)});
      j = {{"holds", v.holds}, {"verdict", v.verdict}, {"frontier", fr}, {"r_U", io::num(v.r_U)},
           {"r_V", io::num(v.r_V)}};
      pass = v.holds;
    } else if (property == "equivalence") {
      auto a = equivalence_audit(F, f.pairs(), mu, pol);
      j = {{"regular", pair_verdict_json(a.regular)}, {"open", pair_verdict_json(a.open)},
           {"strong", pair_verdict_json(a.strong)}, {"agree", a.agree},
           {"implication_ok", a.implication_ok}};
      pass = a.agree && a.implication_ok;
    } else {
      raise(ErrorKind::schema, "unknown property \"" + property + "\" for the parametric setting");
    }
  } else if (setting == "conventional") {
    const auto& F = f.require_plain();
    auto query = [&](QueryMode m) {
      return RegularityQuery{&F, f.pairs(), mu, f.nu, m, f.query.xbar, f.query.ybar};
    };
    if (property == "regular" || property == "nu-regular") {
      auto v = check_metric_regularity(query(property == "regular" ? QueryMode::regular : QueryMode::nu_regular), pol);
      j = conv_json(v);
      pass = v.holds;
    } else if (property == "open") {
      auto v = check_openness(query(f.nu ? QueryMode::nu_open : QueryMode::open), pol);
      j = conv_json(v);
      pass = v.holds;
    } else if (property == "holder") {
      auto v = check_holder(query(f.nu ? QueryMode::nu_holder : QueryMode::holder), pol);
      j = conv_json(v);
      pass = v.holds;
    } else if (property == "local") {
      auto v = check_metric_regularity(query(QueryMode::at_point), pol);
      j = conv_json(v);
      pass = v.holds;
    } else if (property == "equivalence") {
      std::optional<std::pair<std::size_t, std::size_t>> pt;
      if (F.contains(f.query.xbar, f.query.ybar)) pt = std::make_pair(f.query.xbar, f.query.ybar);
      auto a = equivalence_audit_T61(F, f.pairs(), mu, pol, pt, f.nu);
      j = {{"regular", conv_json(a.regular)}, {"open", conv_json(a.open)},
           {"inverse_holder", conv_json(a.inverse_holder)}, {"agree", a.agree},
           {"point_agree", a.point_agree}, {"weak_implied", a.weak_implied},
           {"weak_equivalence_checked", a.weak_equivalence_checked}, {"part_iii", a.part_iii}};
      pass = a.agree && a.point_agree && a.weak_implied && a.weak_agree;
    } else if (property == "decrease") {
      Certificate c = certify_T64(F, f.pairs(), mu, pol);
      j = certificate_json(c);
      pass = c.sound();
    } else if (property == "modulus-fit") {
      ModulusFit fit = estimate_best_modulus(F, f.pairs(), f.query.k, pol);
      j = {{"lambda", io::num(fit.lambda)}, {"k", fit.k},
           {"argmax", fit.argmax ? json{fit.argmax->first, fit.argmax->second} : json(nullptr)},
           {"excluded", fit.excluded}};
      if (!csv_path.empty()) write_file(csv_path, fit.csv());
      pass = std::isfinite(fit.lambda);
    } else {
      raise(ErrorKind::schema, "unknown property \"" + property + "\" for the conventional setting");
    }
  } else {
    raise(ErrorKind::schema, "setting must be param or conventional");
  }
  emit(g, dump(j));
  return verdict(pass, "regcheck " + setting + "/" + property);
}

int cmd_ekeland(const Globals& g, const std::string& path, std::optional<double> eps,
                std::optional<double> lam, std::optional<std::size_t> x0,
                std::optional<std::size_t> verify_only) {
  InstanceFile f = load_instance(path);
  NumericPolicy pol = effective_policy(g, f.policy);
  EVPInstance in = f.evp_instance();
  if (eps) in.epsilon = *eps;
  if (lam) in.lambda = *lam;
  if (x0) in.x0 = *x0;
  in.validate(pol);
  json j;
  std::size_t z;
  bool pass = true;
  if (verify_only) {
    z = *verify_only;
  } else {
    EVPResult r = evp_solve(in, pol);
    z = r.z;
    EVPTraceAudit a = evp_audit_trace(in, r, pol);
    json tr = json::array();
    for (const auto& s : r.trace) tr.push_back({{"x", s.x}, {"a", io::num(s.a)}});
    j["trace"] = tr;
    j["path_length"] = r.path_length;
    j["audit"] = {{"halving", a.halving}, {"monotone", a.monotone}, {"path_bound", a.path_bound},
                  {"length_bound", a.length_bound}, {"half_sup", a.half_sup}};
    pass = a.all();
  }
  EVPVerdict v = evp_verify(in, z, pol);
  pass = pass && v.all();
  j["z"] = z;
  j["verify"] = {{"i", v.i}, {"ii", v.ii}, {"iii", v.iii}, {"distance", io::num(v.distance)},
                 {"worst_u", v.worst_u}, {"worst_margin", io::num(v.worst_margin)}};
  if (g.validate) {
    bool member = contains(evp_oracle(in, pol), z);
    j["oracle_member"] = member;
    pass = pass && member;
  }
  emit(g, dump(j));
  return verdict(pass, "ekeland z=" + std::to_string(z));
}

int cmd_optcond(const Globals& g, const std::string& path, const std::string& task) {
  InstanceFile f = load_instance(path);
  NumericPolicy pol = effective_policy(g, f.policy);
  if (!f.opt) raise(ErrorKind::schema, "instance has no optcond section", "/optcond");
  const OptInstance& in = f.opt->inst;
  Sampler smp;
  smp.seed = pol.seed;
  json j;
  bool pass = true;
  if (task == "cones") {
    TangentCones tc = tangent_cone(in.S, in.xbar, in.tol);
    j["T(S)"] = polyhedron_json(tc.T);
    j["IT(S)"] = polyhedron_json(tc.IT);
    j["active"] = tc.active;
    json N = json::array();
    for (const auto& n : tc.normal_generators) N.push_back(n);
    j["N(S)"] = N;
    FirstOrder fo = first_order(in);
    j["T(-D)"] = polyhedron_json(fo.TnegD);
    j["T(F+)"] = {{"lifted", polyhedron_json(fo.TF.P)}, {"visible", fo.TF.visible}};
    j["T(G+)"] = {{"lifted", polyhedron_json(fo.TG.P)}, {"visible", fo.TG.visible}};
    j["T(H)"] = {{"lifted", polyhedron_json(fo.TH.P)}, {"visible", fo.TH.visible}};
    if (g.validate) {
      std::mt19937_64 rng(pol.seed);
      std::normal_distribution<double> N01;
      std::size_t agree = 0, total = 1000;
      for (std::size_t k = 0; k < total; ++k) {
        Vec d(in.n);
        for (double& v : d) v = N01(rng);
        agree += tc.T.contains(d, 1e-6) == sampled_limit_member(in.S, in.xbar, d, nullptr, smp.gamma_levels);
      }
      j["oracle_agreement"] = static_cast<double>(agree) / total;
      pass = agree * 100 >= total * 99;
    }
  } else if (task == "critical") {
    json arr = json::array();
    for (const auto& t : critical_directions(in, smp))
      arr.push_back({{"u", io::vec(t.u)}, {"v", io::vec(t.v)}, {"k", io::vec(t.k)}});
    j["critical"] = arr;
    pass = !arr.empty();
  } else {
    CriticalTriple t = detail::default_triple(*f.opt, smp);
    j["triple"] = {{"u", io::vec(t.u)}, {"v", io::vec(t.v)}, {"k", io::vec(t.k)}};
    if (task == "multipliers") {
      MultiplierSearch s = find_multipliers(in, t, smp);
      j["interior_hypothesis"] = s.interior_hypothesis;
      j["vacuous"] = s.vacuous;
      j["note"] = s.note;
      pass = s.mult.has_value();
      if (s.mult) {
        j["multipliers"] = {{"v", io::vec(s.mult->v)}, {"k", io::vec(s.mult->k)}, {"w", io::vec(s.mult->w)}};
        Sampler fresh = smp;
        fresh.count = g.validate ? 4 * smp.count : smp.count;
        fresh.seed = smp.seed + 1;
        MultiplierVerdict v = check_multiplier_rule(in, t, *s.mult, fresh);
        j["check"] = {{"holds", v.holds}, {"rhs", io::num(v.rhs)}, {"margin", io::num(v.margin)},
                      {"samples", v.samples}, {"vacuous_samples", v.vacuous_samples}, {"note", v.note}};
        pass = v.holds;
      }
    } else if (task == "cq") {
      CQVerdict v = check_cq(in, t, smp);
      j["holds"] = v.holds;
      j["note"] = v.note;
      if (v.deficiency) j["deficiency"] = io::vec(*v.deficiency);
      pass = v.holds;
    } else if (task == "claim2") {
      Claim2Verdict v = check_claim2(in, t, BallExtension{f.opt->scale}, f.modulus(f.opt->mu),
                                     f.opt->theta, smp);
      json samples = json::array();
      for (const auto& s : v.samples) {
        json lv = json::array();
        for (const auto& L : s.levels)
          lv.push_back({{"n", L.n}, {"proj_dist", io::num(L.proj_dist)},
                        {"proj_bound", io::num(L.proj_bound)}, {"x_err", io::num(L.x_err)},
                        {"x_bound", io::num(L.x_bound)}, {"in_omega", L.in_omega}, {"ok", L.ok}});
        samples.push_back({{"x", io::vec(s.x)}, {"status", s.status}, {"levels", lv}});
      }
      j = {{"holds", v.holds}, {"confirmed", v.confirmed}, {"skipped", v.skipped},
           {"failed", v.failed}, {"vacuous", v.vacuous()}, {"samples", samples}, {"triple", j["triple"]}};
      pass = v.holds && !v.vacuous();
    } else {
      raise(ErrorKind::schema, "unknown task \"" + task + "\"");
    }
  }
  emit(g, dump(j));
  return verdict(pass, "optcond " + task);
}

int cmd_run(const Globals& g, const std::string& path, const std::vector<std::string>& plan_flag,
            const std::string& csv_path) {
  InstanceFile f = load_instance(path);
  NumericPolicy pol = effective_policy(g, f.policy);
  std::vector<std::string> plan = plan_flag.empty() ? f.plan : plan_flag;
  Report rep = run_experiment(f, plan, pol);
  emit(g, dump(rep.to_json()));
  if (!csv_path.empty()) write_file(csv_path, rep.csv());
  std::size_t passed = 0;
  for (const auto& r : rep.rows) passed += r.pass;
  return verdict(rep.all_pass(), "run: " + std::to_string(passed) + "/" + std::to_string(rep.rows.size()) +
                                     " checks pass");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear regularity laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "strict-inequality tolerance");
  app.add_option("--horizon", g.horizon, "iteration horizon");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "write the JSON result here instead of stdout");
  app.add_flag("--validate", g.validate, "also run the sampled-limit and exhaustive oracles");

  std::string path, kind = "plain-lipschitz", criterion, scheme = "default", via = "decrease";
  std::string property = "regular", setting = "param", task = "cones", csv;
  std::size_t size = 20;
  std::optional<std::size_t> x, y, x0, verify_only;
  std::optional<double> t, eps, lam;
  std::string a_seq = "a", b_seq = "b";
  std::vector<std::string> plan;

  auto* load = app.add_subcommand("load", "validate an instance file");
  load->add_option("file", path)->required();

  auto* gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("--kind", kind)->check(CLI::IsMember({"plain-lipschitz", "param-monotone", "evp", "polyhedral-opt"}));
  gen->add_option("--size", size);

  auto* induct = app.add_subcommand("induct", "run the induction iteration");
  induct->add_option("file", path)->required();
  induct->add_option("--x", x);
  induct->add_option("--t", t);
  induct->add_option("--y", y);
  induct->add_option("--a", a_seq, "name of the a_n sequence");
  induct->add_option("--b", b_seq, "name of the b_n sequence");

  auto* certify = app.add_subcommand("certify", "check a covering criterion");
  certify->add_option("file", path)->required();
  certify->add_option("--criterion", criterion)
      ->required()
      ->check(CLI::IsMember({"khanh+", "khanh4+", "image", "decrease", "free-t"}));
  certify->add_option("--scheme", scheme);
  certify->add_option("--via", via, "per-t criterion of free-t")
      ->check(CLI::IsMember({"khanh+", "khanh4+", "image", "decrease"}));
  certify->add_option("--x", x);
  certify->add_option("--t", t);
  certify->add_option("--y", y);

  auto* regcheck = app.add_subcommand("regcheck", "check a regularity property exhaustively");
  regcheck->add_option("file", path)->required();
  regcheck->add_option("--property", property);
  regcheck->add_option("--setting", setting)->check(CLI::IsMember({"param", "conventional"}));
  regcheck->add_option("--csv", csv, "modulus-fit rows");

  auto* ekeland = app.add_subcommand("ekeland", "constructive Ekeland principle");
  ekeland->add_option("file", path)->required();
  ekeland->add_option("--epsilon", eps);
  ekeland->add_option("--lambda", lam);
  ekeland->add_option("--x0", x0);
  ekeland->add_option("--verify-only", verify_only, "check a given z instead of solving");

  auto* optcond = app.add_subcommand("optcond", "second-order optimality conditions");
  optcond->add_option("file", path)->required();
  optcond->add_option("--task", task)
      ->check(CLI::IsMember({"cones", "critical", "multipliers", "cq", "claim2"}));

  auto* run = app.add_subcommand("run", "run a plan of named checks");
  run->add_option("file", path)->required();
  run->add_option("--plan", plan, "check names (default: the plan in the file)")->delimiter(',');
  run->add_option("--csv", csv, "CSV export of the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*load) return cmd_load(g, path);
    if (*gen) return cmd_gen(g, kind, size);
    if (*induct) return cmd_induct(g, path, x, t, y, a_seq, b_seq);
    if (*certify) return cmd_certify(g, path, criterion, scheme, via, x, t, y);
    if (*regcheck) return cmd_regcheck(g, path, property, setting, csv);
    if (*ekeland) return cmd_ekeland(g, path, eps, lam, x0, verify_only);
    if (*optcond) return cmd_optcond(g, path, task);
    if (*run) return cmd_run(g, path, plan, csv);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}
