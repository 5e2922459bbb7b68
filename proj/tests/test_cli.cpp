#include <doctest.h>

#include <cmath>

#include "folint/error.hpp"
#include "helpers.hpp"

using namespace folint;

TEST_SUITE("cli") {

TEST_CASE("manifest schema") {
  const auto spec = parse_manifest(R"j({"name": "t", "m": 3, "n": 1, "p": 1, "metric": [1, 0, 0, "1 + 0.1*sin(x1)", 0, 1],
                                       "d_span": [[1, 0, 0], [0, 1, "a*cos(x2)"]], "params": {"a": 0.5}})j");
  CHECK(spec.m == 3);
  CHECK(spec.metric[3] == "1 + 0.1*sin(x1)");
  CHECK(spec.params.at("a") == 0.5);
  const auto again = manifest_from_json(manifest_json(spec));
  CHECK(dump_json(manifest_json(again)) == dump_json(manifest_json(spec)));
  CHECK_NOTHROW(build_structure(spec));

  CHECK_THROWS_AS(parse_manifest(R"j({"name": "t", "m": 3, "n": 2, "p": 2, "metric": [1,0,0,1,0,1]})j"), InputError);
  CHECK_THROWS_AS(parse_manifest(R"j({"name": "t", "m": 2, "n": 1, "p": 1, "metric": [1, 0]})j"), InputError);
  CHECK_THROWS_AS(parse_manifest(R"j({"name": "t", "m": 2, "n": 1, "p": 1, "metric": [1,0,1], "extra": 1})j"), InputError);
  CHECK_THROWS_AS(parse_manifest(R"j({"m": 2, "n": 1, "p": 1, "metric": [1,0,1]})j"), InputError);
  try {
    parse_manifest(R"j({"name": "t", "m": 2,, "n": 1})j");
    FAIL("accepted malformed JSON");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 21);
  }
}

TEST_CASE("structure validation from manifests") {
  auto spec = parse_manifest(R"j({"name": "t", "m": 2, "n": 1, "p": 1, "metric": ["1 + 0.1*x1", 0, 1]})j");
  CHECK_THROWS_AS(build_structure(spec), GeometryError);
  spec.metric[0] = "1 + sin(x2";
  CHECK_THROWS_AS(build_structure(spec), ParseError);
  spec.metric[0] = "1 + b*sin(x2)";
  CHECK_THROWS_AS(build_structure(spec), InputError);
  spec.metric[0] = "x5";
  CHECK_THROWS_AS(build_structure(spec), InputError);
  // d_span must start with the leaf coordinate fields
  auto lead = parse_manifest(R"j({"name": "t", "m": 3, "n": 1, "p": 1, "metric": [1,0,0,1,0,1],
                                 "d_span": [[1, 1, 0], [0, 1, 0]]})j");
  CHECK_THROWS_AS(build_structure(lead), InputError);
}

TEST_CASE("builtins") {
  CHECK(builtin_manifolds().size() >= 6);
  for (const auto& spec : builtin_manifolds()) {
    CAPTURE(spec.name);
    CHECK_FALSE(spec.suite.empty());
    const auto s = build_structure(spec);
    CHECK(s.n() == spec.n);
    CheckRequest req;
    for (const auto& id : spec.suite) {
      bool known = false;
      for (const auto& name : formula_names()) known = known || id.rfind(name, 0) == 0;
      CHECK_MESSAGE(known, id);
    }
    (void)req;
  }
  CHECK_THROWS_AS(builtin_manifold("no-such-manifold"), InputError);
}

TEST_CASE("formula dispatch") {
  const auto s = folint::test::builtin("flat-torus-3-1-1");
  ProbeCache probes(s, {4, 8, 1e-9});
  CheckRequest req;
  req.options = folint::test::small_options(s);
  req.formula = "closed-newton(0)";
  CHECK(run_formula(s, req, probes).formula_id == "closed-newton(0)");
  req.formula = "closed-newton";
  req.r = 0;
  CHECK(run_formula(s, req, probes).formula_id == "closed-newton(0)");
  req.formula = "closed-general(t1^2)";
  CHECK(run_formula(s, req, probes).status == "evaluated");
  req.formula = "nonsense";
  CHECK_THROWS_AS(run_formula(s, req, probes), InputError);
  req.formula = "closed-general(t1^)";
  CHECK_THROWS_AS(run_formula(s, req, probes), ParseError);
}

TEST_CASE("report serialization") {
  Json j;
  j["a"] = 0.1;
  j["b"] = std::vector<double>{1.0, 2.5};
  j["c"] = std::nan("");
  j["d"] = 1e-300;
  const std::string text = dump_json(j);
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(text.find("[1, 2.5]") != std::string::npos);
  CHECK(text.find("\"c\": null") != std::string::npos);
  CHECK(text.find("\"d\": 1e-300") != std::string::npos);

  const auto s = folint::test::builtin("warped-surface");
  CheckRequest req;
  req.options = folint::test::small_options(s);
  req.formula = "pw";
  ProbeCache p1(s, req.options.probe), p2(s, req.options.probe);
  const auto a = dump_json(report_json(run_formula(s, req, p1), 1e-8, false));
  const auto b = dump_json(report_json(run_formula(s, req, p2), 1e-8, false));
  CHECK(a == b);
  CHECK(a.find("wall_time") == std::string::npos);
  CHECK(a.find("\"relative_residual\"") != std::string::npos);
}

}
