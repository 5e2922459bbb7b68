#include <doctest.h>

#include <cmath>
#include <random>

#include "folint/error.hpp"
#include "folint/structure.hpp"
#include "helpers.hpp"

using namespace folint;
using folint::test::field;
using folint::test::metric;

namespace {

SubRiemannianStructure flat(int m, int n, int p, std::vector<VectorExpr> span = {}) {
  return SubRiemannianStructure("flat", MetricField::identity(m), n, p, std::move(span));
}

}  // namespace

TEST_SUITE("structure") {

TEST_CASE("adapted frames") {
  const auto s = flat(3, 1, 1);
  const auto f = adapted_frame(s, std::vector<double>{0.2, 0.4, 0.6});
  for (int a = 0; a < 3; ++a)
    for (int k = 0; k < 3; ++k) CHECK(f.e(a, k) == (a == k ? 1.0 : 0.0));

  const auto t = flat(3, 1, 1, {field({"1", "0", "0"}), field({"0", "1", "1"})});
  const auto ft = adapted_frame(t, std::vector<double>{0.2, 0.4, 0.6});
  CHECK(ft.e(1, 0) == 0.0);
  CHECK(ft.e(1, 1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(ft.e(1, 2) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(ft.max_gram_error() < 1e-12);

  const auto dep = flat(3, 1, 1, {field({"1", "0", "0"}), field({"1", "0", "0"})});
  CHECK_THROWS_AS(adapted_frame(dep, std::vector<double>{0.0, 0.0, 0.0}), DegeneracyError);
  CHECK_THROWS_AS(dep.validate(4), DegeneracyError);
}

TEST_CASE("orthoprojector") {
  const auto full = flat(3, 1, 2);
  const JetMatrix P = orthoprojector(adapted_frame(full, std::vector<double>{0.1, 0.2, 0.3}));
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) CHECK(P[static_cast<std::size_t>(k * 3 + l)].value() == (k == l ? 1.0 : 0.0));
  const JetMatrix Q = orthoprojector(adapted_frame(flat(3, 1, 1), std::vector<double>{0.1, 0.2, 0.3}));
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      CHECK(Q[static_cast<std::size_t>(k * 3 + l)].value() == (k == l && k < 2 ? 1.0 : 0.0));

  std::mt19937_64 rng(5);
  for (const auto& spec : builtin_manifolds()) {
    CAPTURE(spec.name);
    const auto s = folint::test::builtin(spec.name.c_str());
    for (int t = 0; t < 20; ++t) {
      const auto f = adapted_frame(s, folint::test::random_point(rng, s.dim()));
      CHECK(f.max_gram_error() < 1e-12);
      CHECK(projector_idempotency_error(f) < 1e-12);
      CHECK(projector_selfadjoint_error(f) < 1e-12);
    }
  }
}

TEST_CASE("induced connection") {
  const auto s = folint::test::builtin("twisted-normal");
  const std::vector<double> x = {0.3, 1.2, 2.2, 4.1};
  const auto f = adapted_frame(s, x);
  const int m = 4;
  const ParameterTable none;
  const Jet3 c1 = Expression::parse("sin(x1 + x3)").evaluate_jet(x, none);
  const Jet3 c2 = Expression::parse("cos(x2)*x4").evaluate_jet(x, none);
  std::vector<Jet3> U(m, Jet3(m, 0.0)), V(m, Jet3(m, 0.0));
  for (int k = 0; k < m; ++k) {
    U[k] = c1 * f.e_jet(0, k) + f.e_jet(1, k);
    V[k] = f.e_jet(2, k) - c2 * f.e_jet(1, k);
  }
  const std::vector<double> X = {0.4, -0.2, 1.0, 0.5};
  Jet3 uv(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) uv += f.metric[static_cast<std::size_t>(i * m + j)] * U[i] * V[j];
  double lhs = 0.0;
  for (int k = 0; k < m; ++k) lhs += X[k] * uv.grad(k);
  const auto du = induced_connection(f, X, U), dv = induced_connection(f, X, V);
  std::vector<double> u(m), v(m);
  for (int k = 0; k < m; ++k) {
    u[k] = U[k].value();
    v[k] = V[k].value();
  }
  CHECK(std::abs(lhs - f.inner(du, v) - f.inner(u, dv)) < 1e-10);

  // D = TM: the induced connection is Levi-Civita
  const auto t = folint::test::builtin("full-tangent-3");
  const std::vector<double> y = {0.5, 1.5, 2.5};
  const auto ft = adapted_frame(t, y);
  const Jet3 c3 = Expression::parse("sin(x1 + x3)").evaluate_jet(y, none);
  std::vector<Jet3> W(3, Jet3(3, 0.0));
  for (int k = 0; k < 3; ++k) W[k] = c3 * ft.e_jet(1, k);
  const std::vector<double> Y = {1.0, 0.5, -0.5};
  const auto a = induced_connection(ft, Y, W);
  const auto b = covariant_derivative_field(t.metric(), W, Y, y);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-13);

  const auto fl = adapted_frame(flat(3, 1, 1), y);
  std::vector<Jet3> K = {Jet3(3, 1.0), Jet3(3, 2.0), Jet3(3, 0.0)};
  for (double c : induced_connection(fl, Y, K)) CHECK(c == 0.0);
}

TEST_CASE("curvature of the induced connection") {
  const std::vector<double> X = {0.2, -0.5, 0.7}, Y = {1.0, 0.3, -0.4};
  {
    const auto f = adapted_frame(flat(3, 1, 1), std::vector<double>{0.1, 0.2, 0.3});
    for (double c : curvature_P(f, X, Y, std::vector<double>{1.0, 1.0, 0.0})) CHECK(c == 0.0);
  }
  const auto s = SubRiemannianStructure(
      "t",
      metric(3, {"1+0.2*sin(x2)", "0.1*cos(x1+x3)", "0.05*sin(x3)", "1.3+0.1*cos(x1)", "0.1*sin(x1-x2)",
                 "1+0.2*sin(x3)*cos(x2)"}),
      1, 1, {field({"1", "0", "0"}), field({"0", "1", "0.3*sin(x1)"})});
  const std::vector<double> x = {0.3, 1.1, 2.0};
  const auto f = adapted_frame(s, x);
  const auto U = f.from_frame(std::vector<double>{0.6, -0.8});
  const auto V = f.from_frame(std::vector<double>{0.8, 0.6});
  const auto a = curvature_P(f, X, Y, U);
  const auto d0 = curvature_P_direct(s, x, X, Y, U, 0);
  const auto d1 = curvature_P_direct(s, x, X, Y, U, 1);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(a[k] - d0[k]) < 1e-9);
    CHECK(std::abs(d0[k] - d1[k]) < 1e-9);
  }
  const auto b = curvature_P(f, Y, X, U);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(a[k] + b[k]) < 1e-12);
  CHECK(std::abs(f.inner(a, V) + f.inner(curvature_P(f, X, Y, V), U)) < 1e-10);

  // D = TM: the frame formula reproduces the Riemann tensor
  const auto t = folint::test::builtin("full-tangent-3");
  const auto ft = adapted_frame(t, x);
  const std::vector<double> W = {0.1, 0.2, 0.3};
  const auto r = riemann(t.metric(), x).apply(X, Y, W);
  const auto c = curvature_P(ft, X, Y, W);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(r[k] - c[k]) < 1e-10);
}

TEST_CASE("shape operators") {
  {
    const auto f = adapted_frame(flat(3, 2, 1), std::vector<double>{0.1, 0.2, 0.3});
    const auto A = shape_operator(f, std::vector<double>{0.0, 0.0, 1.0});
    CHECK(max_abs(A.A) == 0.0);
  }
  const auto s = SubRiemannianStructure("w", metric(3, {"1", "0", "0", "exp(0.4*sin(x3))", "0", "1"}), 2, 1);
  for (double z : {0.0, 1.0, 2.5}) {
    const auto f = adapted_frame(s, std::vector<double>{0.3, 0.6, z});
    const auto A = shape_operator(f, std::vector<double>{0.0, 0.0, 1.0});
    CHECK(std::abs(A.A(0, 0)) < 1e-14);
    CHECK(std::abs(A.A(0, 1)) < 1e-14);
    CHECK(A.A(1, 1) == doctest::Approx(-0.2 * std::cos(z)).epsilon(1e-13));
    CHECK(A.raw_asymmetry < 1e-9);
    CHECK(A.h_pairing_residual < 1e-10);
  }
  const auto f = adapted_frame(s, std::vector<double>{0.3, 0.6, 1.0});
  CHECK_THROWS_AS(shape_operator(f, std::vector<double>{0.0, 0.0, 2.0}), InputError);
  CHECK_THROWS_AS(shape_operator(f, std::vector<double>{1.0, 0.0, 0.0}), InputError);
}

TEST_CASE("second fundamental forms") {
  const auto fl = adapted_frame(flat(4, 2, 1), std::vector<double>{0.1, 0.2, 0.3, 0.4});
  const auto sf = second_fundamental(fl, {{1.0}});
  for (double v : sf.h) CHECK(v == 0.0);
  for (double v : sf.H_tilde) CHECK(v == 0.0);
  CHECK(sf.norm2_Ph_perp() == 0.0);

  const auto full = adapted_frame(flat(3, 1, 2), std::vector<double>{0.1, 0.2, 0.3});
  for (double v : second_fundamental(full).H_tilde) CHECK(v == 0.0);

  std::mt19937_64 rng(3);
  const auto s = folint::test::builtin("twisted-normal");
  double worst = 0.0, size = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto f = adapted_frame(s, folint::test::random_point(rng, 4));
    const auto d = second_fundamental(f);
    const int m = 4, p = 2;
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        const auto br = bracket_T_perp(f, a, b);
        for (int g = 0; g < m; ++g) {
          const double tp = d.T_perp[static_cast<std::size_t>((a * p + b) * m + g)];
          worst = std::max(worst, std::abs(tp - br[static_cast<std::size_t>(g)]));
          size = std::max(size, std::abs(tp));
        }
      }
  }
  CHECK(worst < 1e-9);
  CHECK(size > 1e-3);
}

TEST_CASE("curvature scalars") {
  {
    const auto f = adapted_frame(flat(3, 1, 1), std::vector<double>{0.1, 0.2, 0.3});
    const auto c = curvature_scalars(f, PCurvatureTable(f), std::vector<double>{1.0}, true);
    CHECK(c.S_mix == 0.0);
    CHECK(*c.ric_P == 0.0);
    CHECK(*c.K_P == 0.0);
    CHECK_THROWS_AS(
        [] {
          const auto g = adapted_frame(flat(3, 1, 2), std::vector<double>{0.1, 0.2, 0.3});
          curvature_scalars(g, PCurvatureTable(g), {}, true);
        }(),
        InputError);
  }
  // D = TM: mixed scalar curvature from the Riemann tensor
  const auto t = folint::test::builtin("full-tangent-3");
  const std::vector<double> x = {0.9, 0.2, 5.1};
  const auto f = adapted_frame(t, x);
  const auto R = riemann(t.metric(), x);
  double smix = 0.0;
  for (int a = 1; a < 3; ++a) {
    const auto e0 = f.e_vector(0), ea = f.e_vector(a);
    smix += f.inner(R.apply(e0, ea, ea), e0);
  }
  CHECK(std::abs(curvature_scalars(f, PCurvatureTable(f)).S_mix - smix) < 1e-9);

  // dx2^2 + exp(2 eps sin x2) dx1^2 with leaves along x1: K = -f''/f
  const auto w = folint::test::builtin("warped-surface");
  for (double y : {0.3, 1.7, 4.0}) {
    const auto fw = adapted_frame(w, std::vector<double>{1.0, y});
    const double eps = 0.2;
    const double K = eps * std::sin(y) - eps * eps * std::cos(y) * std::cos(y);
    CHECK(*curvature_scalars(fw, PCurvatureTable(fw), {}, true).K_P == doctest::Approx(K).epsilon(1e-12));
  }
}

}
