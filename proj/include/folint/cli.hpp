#pragma once

// Manifests, the builtin registry, checker dispatch, JSON reports and the
// folint command line.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "folint/formulas.hpp"

namespace folint {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

struct ManifoldSpec {
  std::string name;
  std::string description;
  int m = 0, n = 0, p = 0;
  std::vector<std::string> metric;               // upper triangle, row by row
  std::vector<std::vector<std::string>> d_span;  // empty: d_1..d_{n+p}
  ParameterTable params;
  std::vector<std::string> suite;                // formula ids expected to pass
};

/// Schema check only; ParseError carries the byte offset for JSON syntax errors.
ManifoldSpec parse_manifest(const std::string& text);
ManifoldSpec manifest_from_json(const Json& j);
ManifoldSpec read_manifest(const std::string& path);
Json manifest_json(const ManifoldSpec& spec);

/// Parses every expression and, with `validate`, runs the structure validation.
SubRiemannianStructure build_structure(const ManifoldSpec& spec, bool validate = true);

const std::vector<ManifoldSpec>& builtin_manifolds();
/// InputError for unknown names.
const ManifoldSpec& builtin_manifold(const std::string& name);

/// Checker ids: name or name(argument).
const std::vector<std::string>& formula_names();

struct CheckRequest {
  std::string formula;                 // e.g. "closed-newton", "closed-newton(2)", "leafwise(t1^2)"
  int r = 0;
  std::optional<std::string> recipe;
  CheckOptions options;
  int samples = 100;                   // lemma31, divergence-oracles
  int transversal = 3;                 // leaf-sweep
};

/// Formula ids run by --all, in order.
std::vector<std::string> all_formula_ids(const SubRiemannianStructure& s, const CheckRequest& base);

FormulaReport run_formula(const SubRiemannianStructure& s, const CheckRequest& request, ProbeCache& probes);

/// A report passes when evaluated with met hypotheses and relative residual below tol.
Json report_json(const FormulaReport& r, double tol, bool timings);
Json probes_json(const std::vector<HypothesisResult>& probes);

/// Two-space indented JSON with doubles at 17 significant digits.
std::string dump_json(const Json& j);

int cli_main(int argc, char** argv);

}  // namespace folint
