#include <doctest.h>

#include <cmath>
#include <random>

#include "folint/calculus.hpp"
#include "folint/formulas.hpp"
#include "helpers.hpp"

using namespace folint;

namespace {

// D = TM with two-dimensional leaves on a generic metric.
SubRiemannianStructure generic_n2() {
  auto spec = builtin_manifold("full-tangent-3");
  spec.n = 2;
  spec.p = 1;
  return build_structure(spec);
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s = std::max(s, std::abs(c));
  return s;
}

double diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace

TEST_SUITE("calculus") {

TEST_CASE("flat splitting has vanishing divergences") {
  const auto s = folint::test::builtin("flat-torus-4-2-1");
  const auto ctx = point_context(s, std::vector<double>{0.3, 1.0, 2.0, 4.0});
  const auto smp = normal_sample(ctx, std::vector<double>{1.0});
  for (int r = 0; r < 2; ++r) CHECK(norm(divF_direct(ctx, newton_field(smp, r))) == 0.0);
  for (int k = 1; k <= 3; ++k) CHECK(norm(divF_Ak_closed(ctx, smp, k)) == 0.0);
  CHECK(max_abs(curvature_operator_leaf(ctx, std::vector<double>{1.0, 0.5}, std::vector<double>{1.0})) == 0.0);
  CHECK(fiber_integrand_newton(ctx, smp, 0) == 0.0);
}

TEST_CASE("divergence of the identity vanishes") {
  std::mt19937_64 rng(8);
  const auto s = generic_n2();
  for (int t = 0; t < 10; ++t) {
    const auto ctx = point_context(s, folint::test::random_point(rng, 3));
    const auto smp = normal_sample(ctx, std::vector<double>{1.0});
    CHECK(norm(divF_direct(ctx, newton_field(smp, 0))) < 1e-14);
    CHECK(norm(divF_newton_closed(ctx, smp, 0)) == 0.0);
    CHECK(norm(divF_general_closed(ctx, smp, CoefficientRecipe::parse("1; 0", 2))) < 1e-14);
  }
}

TEST_CASE("curvature operator") {
  const auto s = folint::test::builtin("full-tangent-3");
  const std::vector<double> x = {0.4, 2.0, 1.1};
  const auto ctx = point_context(s, x);
  const std::vector<double> y = {0.6, 0.8};
  const auto xi = ctx.frame.from_frame(std::vector<double>{0.0, 0.6, 0.8});
  const std::vector<double> X = {0.2, 0.5, -0.3};  // frame components
  const auto K = curvature_operator(ctx, X, y);
  const auto R = riemann(s.metric(), x);
  const auto e0 = ctx.frame.e_vector(0);
  const auto v = R.apply(e0, ctx.frame.from_frame(X), xi);
  CHECK(std::abs(K(0, 0) - ctx.frame.inner(v, e0)) < 1e-10);

  const auto ric = curvature_scalars(ctx.frame, ctx.rp, y);
  const std::vector<double> xif = {0.0, 0.6, 0.8};
  CHECK(std::abs(curvature_operator(ctx, xif, y).trace() - *ric.ric_P) < 1e-12);
}

TEST_CASE("closed divergence forms agree with the direct divergence") {
  std::mt19937_64 rng(21);
  for (const char* name : {"coupled-4-2-1", "full-tangent-3", "twisted-normal", "warped-torus"}) {
    CAPTURE(name);
    const auto s = folint::test::builtin(name);
    const int n = s.n();
    const auto recipe = random_recipe(n, 1001);
    double worst = 0.0, size = 0.0;
    for (int t = 0; t < 10; ++t) {
      const auto ctx = point_context(s, folint::test::random_point(rng, s.dim()));
      const auto smp = normal_sample(ctx, folint::test::random_unit(rng, s.p()));
      for (int k = 1; k <= std::min(3, n + 1); ++k) {
        SquareMatrix<FrameJet> Ak = smp.powers[static_cast<std::size_t>(k)];
        const auto direct = divF_direct(ctx, Ak);
        worst = std::max(worst, diff(divF_Ak_closed(ctx, smp, k), direct));
        size = std::max(size, norm(direct));
      }
      for (int r = 1; r < n; ++r)
        worst = std::max(worst, diff(divF_newton_closed(ctx, smp, r), divF_direct(ctx, newton_field(smp, r))));
      worst = std::max(worst, diff(divF_general_closed(ctx, smp, recipe), divF_direct(ctx, general_field(smp, recipe))));
      for (int r = 0; r < n; ++r) {
        const auto nr = CoefficientRecipe::newton(r, n);
        CHECK(diff(divF_general_closed(ctx, smp, nr), divF_newton_closed(ctx, smp, r)) < 1e-10);
        CHECK(std::abs(fiber_integrand_general(ctx, smp, nr) - fiber_integrand_newton(ctx, smp, r)) < 1e-10);
      }
    }
    CHECK(worst < 1e-8 * std::max(1.0, size));
  }
}

TEST_CASE("Z-derivative lemma and Codazzi-type equation") {
  std::mt19937_64 rng(17);
  for (const auto& spec : builtin_manifolds()) {
    CAPTURE(spec.name);
    const auto s = build_structure(spec);
    for (int t = 0; t < 10; ++t) {
      const auto ctx = point_context(s, folint::test::random_point(rng, s.dim()));
      const auto smp = normal_sample(ctx, folint::test::random_unit(rng, s.p()));
      CHECK(lemma31_check(ctx, smp) < 1e-8);
      CHECK(codazzi_residual(ctx, smp) < 1e-8);
    }
  }
}

TEST_CASE("divergence splitting for leaf fields") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* name : {"coupled-4-2-1", "block-product", "warped-torus"}) {
    CAPTURE(name);
    const auto s = folint::test::builtin(name);
    const int m = s.dim(), n = s.n();
    for (int t = 0; t < 10; ++t) {
      const auto ctx = point_context(s, folint::test::random_point(rng, m));
      std::vector<FrameJet> Y(static_cast<std::size_t>(m), FrameJet(0.0));
      double hx = 0.0;
      for (int i = 0; i < n; ++i) {
        Y[i] = FrameJet(u(rng));
        for (int a = 0; a < m; ++a) Y[i].d[a] = u(rng);
        hx += Y[i].v * (ctx.sf.H_perp[i] + ctx.sf.H_tilde[i]);
      }
      CHECK(std::abs(div_vector(ctx, Y) - (divF_vector(ctx, Y) - hx)) < 1e-9);
    }
  }
}

TEST_CASE("divergence oracle report separates derived and printed forms") {
  const auto s = folint::test::builtin("flat-torus-3-1-1");
  const auto rep = check_divergence_oracles(s, folint::test::small_options(s), 10);
  CHECK(rep.status == "evaluated");
  CHECK(rep.relative_residual < 1e-12);
  CHECK(rep.value("derived_forms_relative_error") < 1e-12);
}

}
