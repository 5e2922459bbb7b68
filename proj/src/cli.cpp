#include "folint/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace folint {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

std::vector<std::string> diagonal(int m, const std::vector<std::string>& diag) {
  std::vector<std::string> out;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) out.push_back(i == j ? diag[idx(i)] : "0");
  return out;
}

std::vector<std::string> coordinate_field(int m, int axis) {
  std::vector<std::string> v(idx(m), "0");
  v[idx(axis)] = "1";
  return v;
}

std::vector<ManifoldSpec> make_builtins() {
  std::vector<ManifoldSpec> b;
  {
    ManifoldSpec s;
    s.name = "flat-torus-3-1-1";
    s.description = "flat T^3, D = span(d1, d2), leaves along x1";
    s.m = 3, s.n = 1, s.p = 1;
    s.metric = diagonal(3, {"1", "1", "1"});
    s.suite = {"hypotheses", "pw", "closed-newton(0)", "closed-general(newton(0))", "leafwise(newton(0))",
               "leafwise(newton(1))", "autoparallel(0)", "autoparallel-tau(0)", "total-mean(0)", "total-mean(1)",
               "const-curv", "einstein-umbilical", "codim1(0)", "codim1(1)", "lemma31", "divergence-oracles"};
    b.push_back(s);
  }
  {
    ManifoldSpec s;
    s.name = "flat-torus-4-2-1";
    s.description = "flat T^4, D = span(d1, d2, d3), leaves along x1, x2";
    s.m = 4, s.n = 2, s.p = 1;
    s.metric = diagonal(4, {"1", "1", "1", "1"});
    s.suite = {"hypotheses", "pw", "closed-newton(0)", "closed-general(newton(0))", "leafwise(newton(0))",
               "leafwise(newton(1))", "autoparallel(0)", "autoparallel-tau(0)", "total-mean(0)", "total-mean(1)",
               "const-curv", "einstein-umbilical", "codim1(0)", "codim1(1)", "lemma31", "divergence-oracles"};
    b.push_back(s);
  }
  {
    ManifoldSpec s;
    s.name = "warped-torus";
    s.description = "g = diag(1, exp(2 eps sin x1), exp(2 delta sin x1)), D = span(d1, d2); delta = 0 keeps D-tilde harmonic";
    s.m = 3, s.n = 1, s.p = 1;
    s.metric = diagonal(3, {"1", "exp(2*eps*sin(x1))", "exp(2*delta*sin(x1))"});
    s.params = {{"eps", 0.1}, {"delta", 0.0}};
    s.suite = {"hypotheses", "pw", "closed-newton(0)", "leafwise(newton(0))", "leafwise(newton(1))",
               "total-mean(1)", "codim1(0)", "lemma31"};
    b.push_back(s);
  }
  {
    ManifoldSpec s;
    s.name = "full-tangent-3";
    s.description = "D = TM on T^3 with a generic trigonometric metric, leaves along x1";
    s.m = 3, s.n = 1, s.p = 2;
    s.metric = {"1 + 0.2*sin(x2 + x3)", "0.1*cos(x1 - x3)", "0.05*sin(x1 + x2)",
                "1.2 + 0.15*cos(x1)*sin(x3)", "0.08*sin(x2 - x1)", "0.9 + 0.1*cos(x1 + x2 + x3)"};
    s.suite = {"hypotheses", "pw", "closed-newton(0)", "closed-general(newton(0))", "leafwise(newton(0))",
               "total-mean(1)", "lemma31"};
    b.push_back(s);
  }
  {
    ManifoldSpec s;
    s.name = "block-product";
    s.description = "g = g_F(x1) + constant NF block + g(x4) on T^4, n = 1, p = 2";
    s.m = 4, s.n = 1, s.p = 2;
    s.metric = {"1 + 0.3*sin(x1)", "0", "0", "0", "1.5", "0.2", "0", "1", "0", "1 + 0.2*cos(x4)"};
    s.suite = {"hypotheses", "pw", "closed-newton(0)", "leafwise(newton(0))", "autoparallel(0)", "autoparallel-tau(0)",
               "total-mean(0)", "total-mean(1)", "const-curv", "einstein-umbilical", "lemma31", "divergence-oracles"};
    b.push_back(s);
  }
  {
    ManifoldSpec s;
    s.name = "twisted-normal";
    s.description = "flat T^4, D = span(d1, d2 + a sin(x3) d4, d3 + b cos(x2) d1), non-integrable NF";
    s.m = 4, s.n = 1, s.p = 2;
    s.metric = diagonal(4, {"1", "1", "1", "1"});
    s.d_span = {coordinate_field(4, 0), {"0", "1", "0", "a*sin(x3)"}, {"b*cos(x2)", "0", "1", "0"}};
    s.params = {{"a", 0.3}, {"b", 0.2}};
    s.suite = {"hypotheses", "pw", "closed-newton(0)", "leafwise(newton(0))", "total-mean(1)", "lemma31"};
    b.push_back(s);
  }
  {
    ManifoldSpec s;
    s.name = "warped-surface";
    s.description = "g = diag(exp(2 eps sin x2), 1) on T^2, D = TM, leaves along x1";
    s.m = 2, s.n = 1, s.p = 1;
    s.metric = diagonal(2, {"exp(2*eps*sin(x2))", "1"});
    s.params = {{"eps", 0.2}};
    s.suite = {"hypotheses", "pw", "closed-newton(0)", "leafwise(newton(0))", "total-mean(1)", "codim1(0)", "reeb",
               "lemma31"};
    b.push_back(s);
  }
  {
    ManifoldSpec s;
    s.name = "coupled-4-2-1";
    s.description = "generic metric on T^4, n = 2, p = 1, D-tilde with nonzero frame coupling";
    s.m = 4, s.n = 2, s.p = 1;
    s.metric = {"1 + 0.2*sin(x2 + x3)", "0.1*cos(x1 + x3)", "0.05*sin(x3 + x4)", "0.07*cos(x2)",
                "1.3 + 0.1*cos(x1 - x4)", "0.1*sin(x1 - x2)", "0.06*sin(x4)", "1 + 0.2*sin(x3)*cos(x2)",
                "0.08*cos(x1 + x4)", "1.1 + 0.15*cos(x3 + x1)"};
    s.d_span = {coordinate_field(4, 0), coordinate_field(4, 1), {"0.2*cos(x4)", "0", "1", "0.3*sin(x1)"}};
    s.suite = {"hypotheses", "total-mean(1)", "lemma31"};
    b.push_back(s);
  }
  return b;
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(a, e - a + 1);
}

struct FormulaId {
  std::string name;
  std::optional<std::string> arg;
};

FormulaId split_id(const std::string& id) {
  const auto open = id.find('(');
  if (open == std::string::npos) return {trim(id), std::nullopt};
  if (id.back() != ')') throw InputError("formula id '" + id + "' has an unbalanced argument");
  return {trim(id.substr(0, open)), trim(id.substr(open + 1, id.size() - open - 2))};
}

int int_arg(const FormulaId& f, int fallback) {
  if (!f.arg) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(*f.arg, &used);
    if (used == f.arg->size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("formula " + f.name + " needs an integer argument, got '" + *f.arg + "'");
}

CoefficientRecipe recipe_arg(const FormulaId& f, const CheckRequest& req, int n) {
  std::string spec;
  if (f.arg) spec = *f.arg;
  else if (req.recipe) spec = *req.recipe;
  else spec = "newton(" + std::to_string(req.r) + ")";
  bool integer = !spec.empty();
  for (char c : spec) integer = integer && std::isdigit(static_cast<unsigned char>(c));
  if (integer) spec = "newton(" + spec + ")";
  if (spec.rfind("random(", 0) == 0 && spec.back() == ')')
    return random_recipe(n, std::stoull(spec.substr(7, spec.size() - 8)));
  return CoefficientRecipe::parse(spec, n);
}

std::string double_text(double v) {
  if (!std::isfinite(v)) return "null";
  return fmt::format("{:.17g}", v);
}

void dump_into(const Json& j, std::string& out, int indent) {
  const std::string pad(idx(indent + 2), ' ');
  const std::string close(idx(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_into(it.value(), out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalar = true;
      for (const auto& e : j) scalar = scalar && !e.is_structured();
      if (scalar) {
        out += "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          dump_into(j[k], out, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out += pad;
        dump_into(j[k], out, indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += double_text(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw InputError(std::string("invalid ") + what + " '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError(std::string("empty ") + what);
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw InputError(std::string("invalid ") + what + " '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError(std::string("empty ") + what);
  return out;
}

FormulaReport error_report(const std::string& id, const std::exception& e) {
  FormulaReport r;
  r.formula_id = id;
  r.status = "error";
  r.message = e.what();
  return r;
}

}  // namespace

ManifoldSpec manifest_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("manifest must be a JSON object");
  for (const char* key : {"name", "m", "n", "p", "metric"})
    if (!j.contains(key)) throw InputError(std::string("manifest is missing '") + key + "'");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const std::vector<std::string> known = {"name", "description", "m", "n", "p", "metric", "d_span", "params",
                                                   "suite"};
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw InputError("manifest has unknown field '" + it.key() + "'");
  }
  const auto expr_text = [](const Json& e, const std::string& where) {
    if (e.is_string()) return e.get<std::string>();
    if (e.is_number()) return double_text(e.get<double>());
    throw InputError(where + " must be an expression string or a number");
  };
  ManifoldSpec s;
  if (!j["name"].is_string()) throw InputError("manifest 'name' must be a string");
  s.name = j["name"].get<std::string>();
  if (j.contains("description")) s.description = j["description"].get<std::string>();
  for (const char* key : {"m", "n", "p"})
    if (!j[key].is_number_integer()) throw InputError(std::string("manifest '") + key + "' must be an integer");
  s.m = j["m"].get<int>();
  s.n = j["n"].get<int>();
  s.p = j["p"].get<int>();
  if (s.m < 1 || s.m > 4) throw InputError("manifest m must be in 1..4");
  if (s.n < 1 || s.p < 1 || s.n + s.p > s.m) throw InputError("manifest needs n >= 1, p >= 1 and n + p <= m");
  if (!j["metric"].is_array() || j["metric"].size() != idx(s.m * (s.m + 1) / 2))
    throw InputError("manifest metric must list the " + std::to_string(s.m * (s.m + 1) / 2) + " upper-triangle entries");
  for (std::size_t k = 0; k < j["metric"].size(); ++k)
    s.metric.push_back(expr_text(j["metric"][k], "metric entry " + std::to_string(k)));
  if (j.contains("d_span")) {
    const auto& d = j["d_span"];
    if (!d.is_array() || (!d.empty() && d.size() != idx(s.n + s.p)))
      throw InputError("manifest d_span must list n + p vectors");
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (!d[a].is_array() || d[a].size() != idx(s.m))
        throw InputError("d_span vector " + std::to_string(a) + " must have m components");
      std::vector<std::string> v;
      for (std::size_t k = 0; k < d[a].size(); ++k)
        v.push_back(expr_text(d[a][k], "d_span[" + std::to_string(a) + "][" + std::to_string(k) + "]"));
      s.d_span.push_back(std::move(v));
    }
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw InputError("manifest params must be an object");
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
      if (!it.value().is_number()) throw InputError("parameter '" + it.key() + "' must be a number");
      s.params[it.key()] = it.value().get<double>();
    }
  }
  if (j.contains("suite"))
    for (const auto& e : j["suite"]) s.suite.push_back(e.get<std::string>());
  return s;
}

// JSON syntax errors are reported at the zero-based offset of the offending byte.
ManifoldSpec parse_manifest(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  try {
    return manifest_from_json(j);
  } catch (const Json::exception& e) {
    throw InputError(std::string("manifest schema: ") + e.what());
  }
}

ManifoldSpec read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open manifest '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_manifest(ss.str());
  } catch (const Error&) {
    rethrow_with_context(path);
  }
}

Json manifest_json(const ManifoldSpec& spec) {
  Json j;
  j["name"] = spec.name;
  if (!spec.description.empty()) j["description"] = spec.description;
  j["m"] = spec.m;
  j["n"] = spec.n;
  j["p"] = spec.p;
  j["metric"] = spec.metric;
  if (!spec.d_span.empty()) j["d_span"] = spec.d_span;
  Json params = Json::object();
  for (const auto& [k, v] : spec.params) params[k] = v;
  j["params"] = params;
  if (!spec.suite.empty()) j["suite"] = spec.suite;
  return j;
}

SubRiemannianStructure build_structure(const ManifoldSpec& spec, bool validate) {
  std::vector<Expression> upper;
  for (std::size_t k = 0; k < spec.metric.size(); ++k) {
    try {
      upper.push_back(Expression::parse(spec.metric[k]));
    } catch (const Error&) {
      rethrow_with_context("metric entry " + std::to_string(k) + " '" + spec.metric[k] + "'");
    }
  }
  std::vector<VectorExpr> span;
  for (std::size_t a = 0; a < spec.d_span.size(); ++a) {
    VectorExpr v;
    for (std::size_t k = 0; k < spec.d_span[a].size(); ++k) {
      try {
        v.push_back(Expression::parse(spec.d_span[a][k]));
      } catch (const Error&) {
        rethrow_with_context("d_span[" + std::to_string(a) + "][" + std::to_string(k) + "]");
      }
    }
    span.push_back(std::move(v));
  }
  SubRiemannianStructure s(spec.name, MetricField(spec.m, std::move(upper), spec.params), spec.n, spec.p,
                           std::move(span));
  if (validate) s.validate();
  return s;
}

const std::vector<ManifoldSpec>& builtin_manifolds() {
  static const std::vector<ManifoldSpec> b = make_builtins();
  return b;
}

const ManifoldSpec& builtin_manifold(const std::string& name) {
  for (const auto& s : builtin_manifolds())
    if (s.name == name) return s;
  throw InputError("unknown builtin manifold '" + name + "'");
}

const std::vector<std::string>& formula_names() {
  static const std::vector<std::string> names = {
      "hypotheses",  "pw",         "closed-newton",      "closed-general", "leafwise", "leaf-sweep",
      "autoparallel", "autoparallel-tau", "total-mean", "const-curv",    "einstein-umbilical",
      "codim1",      "reeb",       "lemma31",            "divergence-oracles"};
  return names;
}

std::vector<std::string> all_formula_ids(const SubRiemannianStructure& s, const CheckRequest& base) {
  (void)s;
  const std::string r = std::to_string(base.r);
  const std::string rec = base.recipe ? *base.recipe : "newton(" + r + ")";
  return {"hypotheses",          "pw",
          "closed-newton(" + r + ")", "closed-general(" + rec + ")",
          "leafwise(" + rec + ")",    "autoparallel(" + r + ")",
          "autoparallel-tau(" + r + ")", "total-mean(" + r + ")",
          "const-curv",          "einstein-umbilical",
          "codim1(" + r + ")",       "reeb",
          "lemma31",             "divergence-oracles"};
}

FormulaReport run_formula(const SubRiemannianStructure& s, const CheckRequest& req, ProbeCache& probes) {
  const auto f = split_id(req.formula);
  const auto& o = req.options;
  const int n = s.n();
  if (f.name == "hypotheses") return check_hypotheses(s, o, &probes);
  if (f.name == "pw") return check_pw(s, o, &probes);
  if (f.name == "closed-newton") return check_closed_newton(s, int_arg(f, req.r), o, &probes);
  if (f.name == "closed-general") return check_closed_general(s, recipe_arg(f, req, n), o, &probes);
  if (f.name == "leafwise") return check_leafwise(s, recipe_arg(f, req, n), o, &probes);
  if (f.name == "leaf-sweep") return check_leaf_sweep(s, recipe_arg(f, req, n), req.transversal, o, &probes);
  if (f.name == "autoparallel") return check_autoparallel_series(s, int_arg(f, req.r), o, &probes);
  if (f.name == "autoparallel-tau") return check_autoparallel_tau(s, int_arg(f, req.r), o, &probes);
  if (f.name == "total-mean") return check_total_mean(s, int_arg(f, req.r), o, &probes);
  if (f.name == "const-curv") return check_constant_curvature_series(s, o, &probes);
  if (f.name == "einstein-umbilical") return check_einstein_umbilical(s, o, &probes);
  if (f.name == "codim1") return check_codim1(s, int_arg(f, req.r), o, &probes);
  if (f.name == "reeb") return check_reeb(s, o, &probes);
  if (f.name == "lemma31") return check_lemma31(s, o, req.samples, &probes);
  if (f.name == "divergence-oracles") return check_divergence_oracles(s, o, req.samples, &probes);
  throw InputError("unknown formula '" + req.formula + "'");
}

Json probes_json(const std::vector<HypothesisResult>& probes) {
  Json a = Json::array();
  for (const auto& h : probes) {
    Json j;
    j["name"] = h.name;
    j["violation"] = h.violation;
    j["threshold"] = h.threshold;
    j["passed"] = h.passed;
    if (h.fitted) j["fitted"] = *h.fitted;
    a.push_back(j);
  }
  return a;
}

Json report_json(const FormulaReport& r, double tol, bool timings) {
  Json j;
  j["formula_id"] = r.formula_id;
  j["status"] = r.status;
  j["passed"] = r.passed(tol);
  if (!r.message.empty()) j["message"] = r.message;
  j["hypotheses"] = probes_json(r.hypotheses);
  j["residual"] = r.residual;
  j["normalizer"] = r.normalizer;
  j["relative_residual"] = r.relative_residual;
  j["grid"] = r.grid;
  j["sphere"] = r.sphere;
  if (!r.leaf.empty()) j["leaf"] = r.leaf;
  Json values = Json::object();
  for (const auto& [k, v] : r.values) values[k] = v;
  j["values"] = values;
  if (timings) j["wall_time"] = r.wall_time;
  return j;
}

std::string dump_json(const Json& j) {
  std::string out;
  dump_into(j, out, 0);
  out += "\n";
  return out;
}

namespace {

struct CommonArgs {
  std::string manifold, manifest, formula, recipe, grid, leaf, json_path;
  bool all = false, suite = false, timings = false;
  int r = 0, sphere = 32, samples = 100, transversal = 3, probe_grid = 6, probe_sphere = 8;
  double tol = 1e-8;
};

void add_common(CLI::App* app, CommonArgs& a, bool sweep) {
  auto* src = app->add_option_group("source");
  src->add_option("--manifold", a.manifold, "builtin manifold name");
  src->add_option("--manifest", a.manifest, "manifest JSON path");
  src->require_option(1);
  app->add_option("--formula", a.formula, "formula id, e.g. closed-newton or closed-newton(2)");
  if (!sweep) {
    app->add_flag("--all", a.all, "run every formula");
    app->add_flag("--suite", a.suite, "run the designated suite of the manifold");
  }
  app->add_option("--r", a.r, "index r or k")->check(CLI::NonNegativeNumber);
  app->add_option("--recipe", a.recipe, "newton(r), random(seed) or n expressions in t1..tn separated by ';'");
  app->add_option("--grid", a.grid, sweep ? "comma-separated grid levels" : "n or one count per axis");
  app->add_option("--sphere", a.sphere, "fiber resolution");
  app->add_option("--leaf", a.leaf, "leaf basepoint, m or m - n comma-separated coordinates");
  app->add_option("--tol", a.tol, "relative residual tolerance");
  app->add_option("--json", a.json_path, "write the report to this path");
  app->add_option("--samples", a.samples, "random samples for pointwise checks")->check(CLI::PositiveNumber);
  app->add_option("--transversal", a.transversal, "leaf-sweep basepoints per transversal axis")
      ->check(CLI::PositiveNumber);
  app->add_option("--probe-grid", a.probe_grid, "hypothesis probe points per axis");
  app->add_option("--probe-sphere", a.probe_sphere, "hypothesis probe fiber resolution");
  app->add_flag("--timings", a.timings, "include wall times (reports are then not reproducible)");
}

ManifoldSpec load_spec(const CommonArgs& a) {
  if (!a.manifold.empty()) return builtin_manifold(a.manifold);
  return read_manifest(a.manifest);
}

CheckRequest base_request(const CommonArgs& a) {
  CheckRequest q;
  q.r = a.r;
  if (!a.recipe.empty()) q.recipe = a.recipe;
  if (!a.grid.empty()) q.options.grid = parse_int_list(a.grid, "grid");
  q.options.sphere = a.sphere;
  if (!a.leaf.empty()) q.options.leaf = parse_double_list(a.leaf, "leaf");
  q.options.probe.resolution = a.probe_grid;
  q.options.probe.sphere = a.probe_sphere;
  q.samples = a.samples;
  q.transversal = a.transversal;
  return q;
}

Json document_head(const char* command, const ManifoldSpec& spec, const CommonArgs& a, const CheckRequest& q) {
  Json doc;
  doc["tool"] = "folint";
  doc["version"] = kToolVersion;
  doc["command"] = command;
  doc["manifest"] = manifest_json(spec);
  Json scheme;
  scheme["grid"] = q.options.grid;
  scheme["sphere"] = q.options.sphere;
  scheme["leaf"] = q.options.leaf;
  scheme["probe"] = {{"resolution", q.options.probe.resolution},
                     {"sphere", q.options.probe.sphere},
                     {"threshold", q.options.probe.threshold}};
  scheme["samples"] = q.samples;
  scheme["tolerance"] = a.tol;
  doc["scheme"] = scheme;
  return doc;
}

void emit(const Json& doc, const CommonArgs& a, const std::string& table) {
  const std::string text = dump_json(doc);
  if (a.json_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(a.json_path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + a.json_path + "'");
  out << text;
  std::cout << table;
}

std::string row(const FormulaReport& r, double tol) {
  const char* verdict = r.status == "evaluated" ? (r.passed(tol) ? "pass" : "FAIL") : r.status.c_str();
  return fmt::format("{:<34} {:<20} residual {:>12.4e}  relative {:>10.3e}\n", r.formula_id, verdict, r.residual,
                     r.relative_residual);
}

int run_check(const CommonArgs& a) {
  const auto spec = load_spec(a);
  const auto s = build_structure(spec);
  auto q = base_request(a);
  std::vector<std::string> ids;
  if (a.all) ids = all_formula_ids(s, q);
  else if (a.suite) ids = spec.suite;
  else if (!a.formula.empty()) ids = {a.formula};
  else throw InputError("check needs --formula, --all or --suite");
  if (ids.empty()) throw InputError("manifold '" + spec.name + "' has no designated suite");
  ProbeCache probes(s, q.options.probe);
  Json doc = document_head("check", spec, a, q);
  doc["probes"] = probes_json(probes.get());
  Json reports = Json::array();
  std::string table;
  int passed = 0, failed = 0, not_met = 0, inapplicable = 0, errors = 0;
  for (const auto& id : ids) {
    q.formula = id;
    FormulaReport r;
    try {
      r = run_formula(s, q, probes);
    } catch (const Error& e) {
      r = error_report(id, e);
    }
    if (r.status == "error") ++errors;
    else if (r.status == "inapplicable") ++inapplicable;
    else if (r.status == "hypotheses-not-met") ++not_met;
    else if (r.passed(a.tol)) ++passed;
    else ++failed;
    reports.push_back(report_json(r, a.tol, a.timings));
    table += row(r, a.tol);
    if (r.status == "error") table += "    " + r.message + "\n";
  }
  const int status = errors ? 2 : failed ? 1 : 0;
  doc["reports"] = reports;
  doc["summary"] = {{"checks", static_cast<int>(ids.size())}, {"passed", passed},           {"failed", failed},
                    {"hypotheses_not_met", not_met},          {"inapplicable", inapplicable}, {"errors", errors}};
  doc["exit_status"] = status;
  emit(doc, a, table);
  return status;
}

int run_sweep(const CommonArgs& a) {
  const auto spec = load_spec(a);
  const auto s = build_structure(spec);
  auto q = base_request(a);
  if (a.formula.empty()) throw InputError("sweep needs --formula");
  const auto levels = a.grid.empty() ? std::vector<int>{8, 16, 24} : parse_int_list(a.grid, "grid levels");
  if (levels.size() < 2) throw InputError("sweep needs at least two grid levels");
  ProbeCache probes(s, q.options.probe);
  q.formula = a.formula;
  Json doc = document_head("sweep", spec, a, q);
  doc["probes"] = probes_json(probes.get());
  Json rows = Json::array();
  std::string table;
  std::vector<FormulaReport> reports;
  for (int level : levels) {
    q.options.grid = {level};
    auto r = run_formula(s, q, probes);
    if (r.status == "error") throw Error(r.message);
    table += fmt::format("{:>4}  ", level) + row(r, a.tol);
    rows.push_back(report_json(r, a.tol, a.timings));
    reports.push_back(std::move(r));
  }
  bool monotone = true;
  for (std::size_t k = 1; k < reports.size(); ++k)
    monotone = monotone && reports[k].relative_residual <= reports[k - 1].relative_residual + 1e-12;
  const auto& last = reports.back();
  const bool judged = last.status == "evaluated";
  const int status = judged && (!monotone || !last.passed(a.tol)) ? 1 : 0;
  doc["sweep"] = {{"formula_id", last.formula_id}, {"levels", levels}, {"monotone", monotone}, {"reports", rows}};
  doc["exit_status"] = status;
  table += std::string("monotone: ") + (monotone ? "yes" : "no") + "\n";
  emit(doc, a, table);
  return status;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"folint: integral formulas of foliated sub-Riemannian manifolds"};
  app.require_subcommand(1);
  auto* list = app.add_subcommand("list", "builtin manifolds and formula ids");
  std::string describe_name;
  auto* describe = app.add_subcommand("describe", "print a builtin manifest");
  describe->add_option("name", describe_name)->required();
  CommonArgs check_args, sweep_args;
  auto* check = app.add_subcommand("check", "evaluate integral formulas");
  add_common(check, check_args, false);
  auto* sweep = app.add_subcommand("sweep", "residuals over grid levels");
  add_common(sweep, sweep_args, true);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    thread_count();
    if (list->parsed()) {
      std::cout << "manifolds:\n";
      for (const auto& s : builtin_manifolds())
        std::cout << fmt::format("  {:<18} m={} n={} p={}  {}\n", s.name, s.m, s.n, s.p, s.description);
      std::cout << "formulas:\n";
      for (const auto& f : formula_names()) std::cout << "  " << f << "\n";
      return 0;
    }
    if (describe->parsed()) {
      std::cout << dump_json(manifest_json(builtin_manifold(describe_name)));
      return 0;
    }
    if (check->parsed()) return run_check(check_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
  } catch (const std::exception& e) {
    std::cerr << "folint: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace folint
