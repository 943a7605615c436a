#pragma once

// Instance files. Every error carries a JSON-pointer location.

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "certifiers.hpp"
#include "ekeland.hpp"
#include "error.hpp"
#include "induction.hpp"
#include "metric_space.hpp"
#include "modulus.hpp"
#include "numeric.hpp"
#include "optcond.hpp"
#include "regularity.hpp"
#include "svmap.hpp"

namespace nlreg {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

namespace io {

// Non-finite values travel as the strings "inf", "-inf", "nan".
inline json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline std::string ptr(const std::string& base, const std::string& key) { return base + "/" + key; }
inline std::string ptr(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

inline const json& need(const json& j, const std::string& key, const std::string& loc) {
  if (!j.is_object()) raise(ErrorKind::schema, "expected an object", loc);
  auto it = j.find(key);
  if (it == j.end()) raise(ErrorKind::schema, "missing key \"" + key + "\"", loc);
  return *it;
}

inline const json* maybe(const json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double as_double(const json& j, const std::string& loc) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  raise(ErrorKind::schema, "expected a number", loc);
}

inline std::size_t as_index(const json& j, const std::string& loc) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    raise(ErrorKind::schema, "expected a nonnegative integer", loc);
  return j.get<std::size_t>();
}

inline bool as_bool(const json& j, const std::string& loc) {
  if (!j.is_boolean()) raise(ErrorKind::schema, "expected a boolean", loc);
  return j.get<bool>();
}

inline std::string as_string(const json& j, const std::string& loc) {
  if (!j.is_string()) raise(ErrorKind::schema, "expected a string", loc);
  return j.get<std::string>();
}

inline const json& as_array(const json& j, const std::string& loc) {
  if (!j.is_array()) raise(ErrorKind::schema, "expected an array", loc);
  return j;
}

inline std::vector<double> doubles(const json& j, const std::string& loc) {
  std::vector<double> out;
  for (std::size_t i = 0; i < as_array(j, loc).size(); ++i) out.push_back(as_double(j[i], ptr(loc, i)));
  return out;
}

inline IndexSet indices(const json& j, const std::string& loc) {
  IndexSet out;
  for (std::size_t i = 0; i < as_array(j, loc).size(); ++i) out.push_back(as_index(j[i], ptr(loc, i)));
  return out;
}

inline Mat matrix(const json& j, const std::string& loc) {
  Mat out;
  for (std::size_t i = 0; i < as_array(j, loc).size(); ++i) out.push_back(doubles(j[i], ptr(loc, i)));
  return out;
}

// Runs f, re-anchoring library errors that carry no location of their own.
template <class Fn>
auto anchored(const std::string& loc, Fn&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.location().rfind(loc, 0) == 0) throw;
    throw e.at(loc);
  }
}

}  // namespace io

// ---- parsing of the building blocks ------------------------------------

inline Metric parse_metric(const std::string& s, const std::string& loc) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "manhattan") return Metric::manhattan;
  if (s == "chebyshev") return Metric::chebyshev;
  if (s == "matrix") return Metric::matrix;
  raise(ErrorKind::schema, "unknown metric \"" + s + "\"", loc);
}

// {"points": [[..]] | "labels": [..], "metric": ..., "dmatrix": [[..]]}
inline FiniteMetricSpace parse_space(const json& j, const std::string& loc, double matrix_tol = 1e-9) {
  Metric m = parse_metric(io::as_string(io::need(j, "metric", loc), io::ptr(loc, "metric")),
                          io::ptr(loc, "metric"));
  std::vector<std::string> labels;
  if (auto* l = io::maybe(j, "labels"))
    for (std::size_t i = 0; i < io::as_array(*l, io::ptr(loc, "labels")).size(); ++i)
      labels.push_back(io::as_string((*l)[i], io::ptr(io::ptr(loc, "labels"), i)));
  return io::anchored(loc, [&] {
    if (m == Metric::matrix) {
      Mat d = io::matrix(io::need(j, "dmatrix", loc), io::ptr(loc, "dmatrix"));
      if (!labels.empty() && labels.size() != d.size())
        raise(ErrorKind::schema, "labels and dmatrix sizes differ", "/labels");
      return FiniteMetricSpace::from_matrix(std::move(d), std::move(labels), matrix_tol);
    }
    Mat pts = io::matrix(io::need(j, "points", loc), io::ptr(loc, "points"));
    if (!labels.empty() && labels.size() != pts.size())
      raise(ErrorKind::schema, "labels and points sizes differ", "/labels");
    return FiniteMetricSpace::from_points(std::move(pts), m, std::move(labels));
  });
}

inline json space_to_json(const FiniteMetricSpace& X) {
  json j;
  j["metric"] = to_string(X.metric());
  if (X.metric() == Metric::matrix) {
    json d = json::array();
    for (std::size_t i = 0; i < X.size(); ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < X.size(); ++k) row.push_back(X(i, k));
      d.push_back(row);
    }
    j["dmatrix"] = d;
  } else {
    json p = json::array();
    for (std::size_t i = 0; i < X.size(); ++i) p.push_back(X.coords(i));
    j["points"] = p;
  }
  if (!X.labels().empty()) j["labels"] = X.labels();
  return j;
}

// {"kind": "linear", "c"} | {"kind": "power", "lambda", "k"} |
// {"kind": "constant", "c"} | {"kind": "table", "s", "v", "step"}
inline ScalarFunction parse_function(const json& j, const std::string& loc) {
  std::string kind = io::as_string(io::need(j, "kind", loc), io::ptr(loc, "kind"));
  auto get = [&](const char* k) { return io::as_double(io::need(j, k, loc), io::ptr(loc, k)); };
  return io::anchored(loc, [&] {
    if (kind == "linear") return ScalarFunction::linear(get("c"));
    if (kind == "power") return ScalarFunction::power(get("lambda"), get("k"));
    if (kind == "constant") return ScalarFunction::constant(get("c"));
    if (kind == "table") {
      bool step = false;
      if (auto* s = io::maybe(j, "step")) step = io::as_bool(*s, io::ptr(loc, "step"));
      return ScalarFunction::table(io::doubles(io::need(j, "s", loc), io::ptr(loc, "s")),
                                   io::doubles(io::need(j, "v", loc), io::ptr(loc, "v")), step);
    }
    raise(ErrorKind::schema, "unknown function kind \"" + kind + "\"", "/kind");
  });
}

// {"geometric": [first, ratio]} | {"table": [..]}
inline SequenceSpec parse_sequence(const json& j, const std::string& loc) {
  return io::anchored(loc, [&] {
    if (auto* g = io::maybe(j, "geometric")) {
      auto v = io::doubles(*g, io::ptr(loc, "geometric"));
      if (v.size() != 2) raise(ErrorKind::schema, "geometric needs [first, ratio]", "/geometric");
      return SequenceSpec::geometric(v[0], v[1]);
    }
    if (auto* t = io::maybe(j, "table"))
      return SequenceSpec::explicit_table(io::doubles(*t, io::ptr(loc, "table")));
    raise(ErrorKind::schema, "sequence needs \"geometric\" or \"table\"", "");
  });
}

inline ScaledSequence parse_scaled(const json& j, const std::string& loc) {
  ScaledSequence s{parse_sequence(j, loc), SeqScale::absolute};
  if (auto* sc = io::maybe(j, "scale")) {
    std::string v = io::as_string(*sc, io::ptr(loc, "scale"));
    if (v == "absolute") s.scale = SeqScale::absolute;
    else if (v == "t") s.scale = SeqScale::times_t;
    else if (v == "mu(t)") s.scale = SeqScale::times_mu_t;
    else raise(ErrorKind::schema, "scale must be absolute, t or mu(t)", io::ptr(loc, "scale"));
  }
  return s;
}

inline AuxScheme parse_scheme(const json& j, const std::string& loc) {
  AuxScheme s;
  if (auto* b = io::maybe(j, "b")) s.b = parse_function(*b, io::ptr(loc, "b"));
  if (auto* m = io::maybe(j, "m")) s.m = parse_function(*m, io::ptr(loc, "m"));
  if (auto* bn = io::maybe(j, "bn")) s.bn = parse_scaled(*bn, io::ptr(loc, "bn"));
  if (auto* cn = io::maybe(j, "cn")) s.cn = parse_scaled(*cn, io::ptr(loc, "cn"));
  return s;
}

// {"dim": n?, "A": [[..]], "b": [..]}
inline Polyhedron parse_polyhedron(const json& j, const std::string& loc) {
  Mat A = io::matrix(io::need(j, "A", loc), io::ptr(loc, "A"));
  Vec b = io::doubles(io::need(j, "b", loc), io::ptr(loc, "b"));
  std::size_t dim = 0;
  if (auto* d = io::maybe(j, "dim")) dim = io::as_index(*d, io::ptr(loc, "dim"));
  else if (!A.empty()) dim = A.front().size();
  else raise(ErrorKind::schema, "a polyhedron without rows needs \"dim\"", loc);
  return Polyhedron::make(dim, std::move(A), std::move(b), loc);
}

inline json polyhedron_to_json(const Polyhedron& P) {
  json A = json::array();
  for (const auto& r : P.A) A.push_back(r);
  return {{"dim", P.dim}, {"A", A}, {"b", P.b}};
}

inline NumericPolicy parse_policy(const json& j, const std::string& loc, NumericPolicy p = {}) {
  if (auto* v = io::maybe(j, "tol_strict")) p.tol_strict = io::as_double(*v, io::ptr(loc, "tol_strict"));
  if (auto* v = io::maybe(j, "horizon")) p.horizon = static_cast<int>(io::as_index(*v, io::ptr(loc, "horizon")));
  if (auto* v = io::maybe(j, "seed")) p.seed = io::as_index(*v, io::ptr(loc, "seed"));
  if (auto* v = io::maybe(j, "oracle_cap")) p.oracle_cap = io::as_index(*v, io::ptr(loc, "oracle_cap"));
  if (auto* v = io::maybe(j, "osc_resolution"))
    p.osc_resolution = static_cast<int>(io::as_index(*v, io::ptr(loc, "osc_resolution")));
  if (auto* v = io::maybe(j, "matrix_tol")) p.matrix_tol = io::as_double(*v, io::ptr(loc, "matrix_tol"));
  if (!(p.tol_strict >= 0)) raise(ErrorKind::schema, "tol_strict must be >= 0", io::ptr(loc, "tol_strict"));
  return p;
}

inline json policy_to_json(const NumericPolicy& p) {
  return {{"tol_strict", p.tol_strict}, {"horizon", p.horizon},           {"seed", p.seed},
          {"oracle_cap", p.oracle_cap}, {"osc_resolution", p.osc_resolution}, {"matrix_tol", p.matrix_tol}};
}

// ---- the instance file ---------------------------------------------------

// Default point/level query used by induct and certify.
struct Query {
  std::size_t x = 0, y = 0;
  double t = 0;
  std::size_t xbar = 0, ybar = 0;
  std::optional<IndexSet> U;  // restriction of the induction
  double k = 1;               // exponent of the modulus fit
};

struct EVPData {
  std::vector<double> f;
  double epsilon = 1, lambda = 1;
  std::size_t x0 = 0;
};

struct OptData {
  OptInstance inst;
  std::optional<CriticalTriple> triple;
  double theta = 1;
  double scale = 1;
  std::string mu = "mu";
};

struct InstanceFile {
  int version = kFormatVersion;
  NumericPolicy policy;
  SpacePtr X, Y;
  std::optional<TLadder> ladder;
  std::optional<ParamSetValuedMap> param;  // explicit or embedded
  std::optional<PlainSetValuedMap> plain;
  std::string embed;                       // "", "open" or "closed"
  std::map<std::string, FunctionalModulus> moduli;
  std::map<std::string, AuxScheme> schemes;
  std::map<std::string, SequenceSpec> sequences;
  std::optional<PairSet> W;
  std::optional<std::vector<double>> nu;
  Query query;
  std::optional<EVPData> evp;
  std::optional<OptData> opt;
  std::vector<std::string> plan;
  json meta = json::object();

  const FunctionalModulus& modulus(const std::string& name) const {
    auto it = moduli.find(name);
    if (it == moduli.end()) raise(ErrorKind::schema, "no modulus named \"" + name + "\"", "/moduli");
    return it->second;
  }
  const SequenceSpec& sequence(const std::string& name) const {
    auto it = sequences.find(name);
    if (it == sequences.end()) raise(ErrorKind::schema, "no sequence named \"" + name + "\"", "/sequences");
    return it->second;
  }
  AuxScheme scheme(const std::string& name = "default") const {
    auto it = schemes.find(name);
    return it == schemes.end() ? AuxScheme{} : it->second;
  }
  const ParamSetValuedMap& require_param() const {
    if (!param) raise(ErrorKind::schema, "instance has no parametric map (graph or embedded plain_graph)");
    return *param;
  }
  const PlainSetValuedMap& require_plain() const {
    if (!plain) raise(ErrorKind::schema, "instance has no plain_graph");
    return *plain;
  }
  // W from the file, else all of X x Y.
  PairSet pairs() const {
    if (W) return *W;
    if (!X || !Y) raise(ErrorKind::schema, "instance has no spaces");
    return product(X->all(), Y->all());
  }
  EVPInstance evp_instance() const {
    if (!evp) raise(ErrorKind::schema, "instance has no evp section");
    return {X.get(), evp->f, evp->epsilon, evp->lambda, evp->x0};
  }
};

inline PairSet parse_pairs(const json& j, const std::string& loc, const InstanceFile& f) {
  if (j.is_string() && j.get<std::string>() == "all") return product(f.X->all(), f.Y->all());
  if (j.is_object()) {
    IndexSet U = io::indices(io::need(j, "U", loc), io::ptr(loc, "U"));
    IndexSet V = io::indices(io::need(j, "V", loc), io::ptr(loc, "V"));
    for (std::size_t i = 0; i < U.size(); ++i)
      io::anchored(io::ptr(io::ptr(loc, "U"), i), [&] { f.X->check_index(U[i]); });
    for (std::size_t i = 0; i < V.size(); ++i)
      io::anchored(io::ptr(io::ptr(loc, "V"), i), [&] { f.Y->check_index(V[i]); });
    return product(U, V);
  }
  PairSet W;
  for (std::size_t i = 0; i < io::as_array(j, loc).size(); ++i) {
    std::string li = io::ptr(loc, i);
    IndexSet p = io::indices(j[i], li);
    if (p.size() != 2) raise(ErrorKind::schema, "pair needs two indices", li);
    io::anchored(li, [&] {
      f.X->check_index(p[0]);
      f.Y->check_index(p[1]);
    });
    W.emplace_back(p[0], p[1]);
  }
  return W;
}

inline Polyhedron opt_polyhedron(const json& j, const std::string& key) {
  return parse_polyhedron(io::need(j, key, ""), "/" + key);
}

inline OptData parse_opt(const json& j) {
  OptData d;
  OptInstance& in = d.inst;
  in.S = opt_polyhedron(j, "S");
  in.C = opt_polyhedron(j, "C");
  in.D = opt_polyhedron(j, "D");
  in.Q = opt_polyhedron(j, "Q");
  in.F_graph = opt_polyhedron(j, "F_graph");
  in.G_graph = opt_polyhedron(j, "G_graph");
  in.H_graph = opt_polyhedron(j, "H_graph");
  const json& base = io::as_array(io::need(j, "base", ""), "/base");
  if (base.size() != 3) raise(ErrorKind::schema, "base must be [xbar, ybar, zbar]", "/base");
  in.xbar = io::doubles(base[0], "/base/0");
  in.ybar = io::doubles(base[1], "/base/1");
  in.zbar = io::doubles(base[2], "/base/2");
  in.n = in.S.dim;
  in.p = in.C.dim;
  in.q = in.D.dim;
  if (in.H_graph.dim < in.n) raise(ErrorKind::size, "H_graph dimension is below dim S", "/H_graph");
  in.r = in.H_graph.dim - in.n;
  if (auto* t = io::maybe(j, "tol")) in.tol = io::as_double(*t, "/tol");
  in.validate();
  if (auto* t = io::maybe(j, "triple")) {
    CriticalTriple c;
    c.u = io::doubles(io::need(*t, "u", "/triple"), "/triple/u");
    c.v = io::doubles(io::need(*t, "v", "/triple"), "/triple/v");
    c.k = io::doubles(io::need(*t, "k", "/triple"), "/triple/k");
    d.triple = c;
  }
  if (auto* t = io::maybe(j, "theta")) d.theta = io::as_double(*t, "/theta");
  if (auto* t = io::maybe(j, "scale")) d.scale = io::as_double(*t, "/scale");
  if (auto* t = io::maybe(j, "mu")) d.mu = io::as_string(*t, "/mu");
  return d;
}

inline InstanceFile parse_instance(const json& j) {
  if (!j.is_object()) raise(ErrorKind::schema, "instance must be a JSON object", "");
  InstanceFile f;
  if (auto* v = io::maybe(j, "version")) {
    f.version = static_cast<int>(io::as_index(*v, "/version"));
    if (f.version != kFormatVersion)
      raise(ErrorKind::schema, "unsupported format version " + std::to_string(f.version), "/version");
  }
  if (auto* p = io::maybe(j, "policy")) f.policy = parse_policy(*p, "/policy");

  if (auto* s = io::maybe(j, "space")) {
    f.X = share(parse_space(*s, "/space", f.policy.matrix_tol));
    f.Y = f.X;
  }
  if (auto* s = io::maybe(j, "X")) f.X = share(parse_space(*s, "/X", f.policy.matrix_tol));
  if (auto* s = io::maybe(j, "Y")) f.Y = share(parse_space(*s, "/Y", f.policy.matrix_tol));
  if (f.X && !f.Y) f.Y = f.X;

  if (auto* l = io::maybe(j, "ladder")) f.ladder = io::anchored("", [&] { return TLadder(io::doubles(*l, "/ladder")); });

  const json* graph = io::maybe(j, "graph");
  const json* plain = io::maybe(j, "plain_graph");
  if ((graph || plain) && !f.X) raise(ErrorKind::schema, "a map needs \"X\" (or \"space\")", "");
  if (graph && plain) raise(ErrorKind::schema, "give either \"graph\" or \"plain_graph\"", "/graph");
  if (graph) {
    if (!f.ladder) raise(ErrorKind::schema, "a parametric graph needs a \"ladder\"", "/ladder");
    std::vector<Triple> triples;
    for (std::size_t i = 0; i < io::as_array(*graph, "/graph").size(); ++i) {
      IndexSet v = io::indices((*graph)[i], io::ptr("/graph", i));
      if (v.size() != 3) raise(ErrorKind::schema, "graph entries are [x, t, y]", io::ptr("/graph", i));
      triples.push_back({v[0], v[1], v[2]});
    }
    bool mono = false;
    if (auto* m = io::maybe(j, "monotone")) mono = io::as_bool(*m, "/monotone");
    f.param.emplace(f.X, f.Y, *f.ladder, triples, mono);
  }
  if (plain) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < io::as_array(*plain, "/plain_graph").size(); ++i) {
      IndexSet v = io::indices((*plain)[i], io::ptr("/plain_graph", i));
      if (v.size() != 2) raise(ErrorKind::schema, "plain_graph entries are [x, y]", io::ptr("/plain_graph", i));
      pairs.emplace_back(v[0], v[1]);
    }
    f.plain.emplace(f.X, f.Y, std::move(pairs));
    if (auto* e = io::maybe(j, "embed")) {
      f.embed = io::as_string(*e, "/embed");
      if (f.embed != "open" && f.embed != "closed")
        raise(ErrorKind::schema, "embed must be \"open\" or \"closed\"", "/embed");
      if (!f.ladder) raise(ErrorKind::schema, "an embedding needs a \"ladder\"", "/ladder");
      f.param = embed_plain(*f.plain, *f.ladder, f.embed == "closed", f.policy.tol_strict);
    }
  }

  if (auto* m = io::maybe(j, "moduli")) {
    if (!m->is_object()) raise(ErrorKind::schema, "expected an object", "/moduli");
    for (auto it = m->begin(); it != m->end(); ++it)
      f.moduli.emplace(it.key(), parse_function(it.value(), "/moduli/" + it.key()));
  }
  if (auto* m = io::maybe(j, "schemes")) {
    if (!m->is_object()) raise(ErrorKind::schema, "expected an object", "/schemes");
    for (auto it = m->begin(); it != m->end(); ++it)
      f.schemes.emplace(it.key(), parse_scheme(it.value(), "/schemes/" + it.key()));
  }
  if (auto* m = io::maybe(j, "sequences")) {
    if (!m->is_object()) raise(ErrorKind::schema, "expected an object", "/sequences");
    for (auto it = m->begin(); it != m->end(); ++it)
      f.sequences.emplace(it.key(), parse_sequence(it.value(), "/sequences/" + it.key()));
  }
  if (auto* w = io::maybe(j, "W")) {
    if (!f.X) raise(ErrorKind::schema, "W needs spaces", "/W");
    f.W = parse_pairs(*w, "/W", f);
  }
  if (auto* nu = io::maybe(j, "nu")) {
    f.nu = io::doubles(*nu, "/nu");
    if (f.nu->size() != f.pairs().size())
      raise(ErrorKind::size, "nu has " + std::to_string(f.nu->size()) + " entries for " +
                                 std::to_string(f.pairs().size()) + " pairs", "/nu");
    for (std::size_t i = 0; i < f.nu->size(); ++i)
      if (!((*f.nu)[i] > 0)) raise(ErrorKind::domain, "nu must be positive", io::ptr("/nu", i));
  }
  if (auto* q = io::maybe(j, "query")) {
    auto idx = [&](const char* k, std::size_t& out) {
      if (auto* v = io::maybe(*q, k)) out = io::as_index(*v, std::string("/query/") + k);
    };
    idx("x", f.query.x);
    idx("y", f.query.y);
    idx("xbar", f.query.xbar);
    idx("ybar", f.query.ybar);
    if (auto* v = io::maybe(*q, "t")) f.query.t = io::as_double(*v, "/query/t");
    if (auto* v = io::maybe(*q, "k")) f.query.k = io::as_double(*v, "/query/k");
    if (auto* v = io::maybe(*q, "U")) f.query.U = normalized(io::indices(*v, "/query/U"));
    if (f.X) {
      io::anchored("/query/x", [&] { f.X->check_index(f.query.x); });
      io::anchored("/query/xbar", [&] { f.X->check_index(f.query.xbar); });
      io::anchored("/query/y", [&] { f.Y->check_index(f.query.y); });
      io::anchored("/query/ybar", [&] { f.Y->check_index(f.query.ybar); });
    }
  }
  if (auto* e = io::maybe(j, "evp")) {
    if (!f.X) raise(ErrorKind::schema, "evp needs \"X\" (or \"space\")", "/evp");
    EVPData d;
    d.f = io::doubles(io::need(*e, "f", "/evp"), "/evp/f");
    d.epsilon = io::as_double(io::need(*e, "epsilon", "/evp"), "/evp/epsilon");
    d.lambda = io::as_double(io::need(*e, "lambda", "/evp"), "/evp/lambda");
    d.x0 = io::as_index(io::need(*e, "x0", "/evp"), "/evp/x0");
    f.evp = d;
    io::anchored("/evp", [&] { f.evp_instance().validate(f.policy); });
  }
  if (auto* o = io::maybe(j, "optcond")) f.opt = io::anchored("/optcond", [&] { return parse_opt(*o); });
  if (auto* p = io::maybe(j, "plan")) {
    for (std::size_t i = 0; i < io::as_array(*p, "/plan").size(); ++i)
      f.plan.push_back(io::as_string((*p)[i], io::ptr("/plan", i)));
  }
  if (auto* m = io::maybe(j, "meta")) f.meta = *m;
  return f;
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorKind::parse, e.what(), "byte " + std::to_string(e.byte));
  }
}

inline InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::parse, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(parse_json_text(ss.str()));
}

// Compact, key-sorted, shortest round-trip numbers: identical inputs give
// identical bytes.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace nlreg
