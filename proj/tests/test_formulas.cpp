#include <doctest.h>

#include <cmath>

#include "folint/error.hpp"
#include "folint/formulas.hpp"
#include "helpers.hpp"

using namespace folint;

TEST_SUITE("formulas") {

TEST_CASE("flat splittings are exact") {
  for (const char* name : {"flat-torus-3-1-1", "flat-torus-4-2-1"}) {
    CAPTURE(name);
    const auto s = folint::test::builtin(name);
    CheckRequest base;
    base.options = folint::test::small_options(s);
    base.samples = 10;
    ProbeCache probes(s, base.options.probe);
    for (const auto& h : probes.get()) {
      CAPTURE(h.name);
      CHECK(h.violation == 0.0);
    }
    for (const auto& id : all_formula_ids(s, base)) {
      CAPTURE(id);
      CheckRequest req = base;
      req.formula = id;
      const auto rep = run_formula(s, req, probes);
      if (rep.status == "inapplicable") continue;
      CHECK(rep.status == "evaluated");
      CHECK(std::abs(rep.residual) < 1e-12);
    }
  }
}

TEST_CASE("hypothesis probes") {
  const auto w = folint::test::builtin("warped-torus");
  const auto probes = probe_hypotheses(w, {4, 8, 1e-9});
  REQUIRE(probes.size() == 8);
  const auto find = [&](HypothesisKind k) {
    for (const auto& h : probes)
      if (h.name == hypothesis_name(k)) return h;
    FAIL("missing probe");
    return HypothesisResult{};
  };
  CHECK(find(HypothesisKind::kHarmonicDtilde).passed);
  // geodesic leaves, but the normal direction is not auto-parallel
  CHECK(find(HypothesisKind::kHarmonicF).passed);
  CHECK_FALSE(find(HypothesisKind::kAutoparallelNF).passed);
  CHECK(find(HypothesisKind::kAutoparallelNF).violation > 1e-3);

  const auto b = folint::test::builtin("block-product");
  const auto c = check_hypothesis(b, HypothesisKind::kConstantCurvature, {4, 8, 1e-9});
  CHECK(c.passed);
  REQUIRE(c.fitted.has_value());
  CHECK(std::abs(*c.fitted) < 1e-10);
}

TEST_CASE("closed theorem residuals on a generic metric") {
  const auto s = folint::test::builtin("full-tangent-3");
  CheckOptions opt;
  opt.grid = {12};
  opt.sphere = 16;
  opt.probe.resolution = 4;
  for (const auto& rep : {check_pw(s, opt), check_closed_newton(s, 0, opt),
                          check_closed_general(s, random_recipe(1, 1001), opt)}) {
    CAPTURE(rep.formula_id);
    CHECK(rep.status == "evaluated");
    CHECK(rep.normalizer > 1e-3);
    CHECK(rep.relative_residual < 1e-6);
  }
}

TEST_CASE("leafwise residuals") {
  const auto s = folint::test::builtin("warped-torus");
  CheckOptions opt;
  opt.grid = {32};
  opt.probe.resolution = 4;
  for (double z : {0.0, 1.0, 2.5}) {
    opt.leaf = {z, 0.7};
    const auto rep = check_leafwise(s, CoefficientRecipe::newton(0, 1), opt);
    CHECK(rep.status == "evaluated");
    CHECK(rep.relative_residual < 1e-8);
  }
  opt.leaf = {1.0};
  CHECK_THROWS_AS(check_leafwise(s, CoefficientRecipe::newton(0, 1), opt), InputError);
}

TEST_CASE("total mean curvatures") {
  for (const char* name : {"warped-torus", "full-tangent-3", "warped-surface"}) {
    CAPTURE(name);
    const auto s = folint::test::builtin(name);
    const auto rep = check_total_mean(s, 1, folint::test::small_options(s));
    CHECK(rep.status == "evaluated");
    CHECK(std::abs(rep.value("sigma_F")) < 1e-12);
    CHECK(std::abs(rep.value("tau_F")) < 1e-12);
  }
  const auto f = folint::test::builtin("flat-torus-3-1-1");
  const auto r0 = check_total_mean(f, 0, folint::test::small_options(f));
  CHECK(r0.value("sigma_F") == doctest::Approx(r0.value("sigma_0_F_closed")).epsilon(1e-12));
  CHECK(r0.value("tau_F") == doctest::Approx(r0.value("tau_0_F_closed")).epsilon(1e-12));
}

TEST_CASE("constant curvature and Einstein series") {
  for (const char* name : {"flat-torus-4-2-1", "block-product"}) {
    CAPTURE(name);
    const auto s = folint::test::builtin(name);
    auto opt = folint::test::small_options(s);
    const auto c = check_constant_curvature_series(s, opt);
    CHECK(c.status == "evaluated");
    CHECK(std::abs(c.value("fitted_c")) < 1e-10);
    CHECK(c.value("recursion_discrepancy") < 1e-9);
    const auto e = check_einstein_umbilical(s, opt);
    CHECK(e.status == "evaluated");
  }
}

TEST_CASE("codimension one") {
  const auto s = folint::test::builtin("warped-surface");
  CheckOptions opt;
  opt.grid = {16};
  opt.probe.resolution = 4;
  const auto rep = check_codim1(s, 0, opt);
  CHECK(rep.status == "evaluated");
  CHECK(rep.relative_residual < 1e-8);
  CHECK(std::abs(rep.value("gaussian_P_integral")) < 1e-9);
  CHECK(rep.value("gaussian_P_abs_integral") > 1e-2);
  CHECK(check_codim1(folint::test::builtin("full-tangent-3"), 0, opt).status == "inapplicable");
  CHECK(check_reeb(folint::test::builtin("warped-torus"), opt).status == "inapplicable");
  CHECK(check_reeb(s, opt).relative_residual < 1e-8);
}

TEST_CASE("inapplicable ranges") {
  const auto s = folint::test::builtin("flat-torus-3-1-1");
  const auto opt = folint::test::small_options(s);
  CHECK(check_closed_newton(s, 5, opt).status == "inapplicable");
  CHECK(check_closed_general(s, CoefficientRecipe::newton(0, 2), opt).status == "inapplicable");
  CHECK(check_total_mean(s, 9, opt).status == "inapplicable");
}

TEST_CASE("helpers") {
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(0.5, 2) == doctest::Approx(-0.125));
  CHECK(binomial(3, 0) == 1.0);
  CHECK(random_recipe(2, 7).to_string() == random_recipe(2, 7).to_string());
  CHECK(random_recipe(2, 7).to_string() != random_recipe(2, 8).to_string());
  CHECK(random_recipe(3, 1).arity() == 3);
}

}
