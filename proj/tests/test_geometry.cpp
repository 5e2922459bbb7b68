#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "folint/error.hpp"
#include "folint/geometry.hpp"
#include "helpers.hpp"

using namespace folint;
using folint::test::metric;

TEST_SUITE("geometry") {

TEST_CASE("metric jets") {
  const JetMatrix flat = MetricField::identity(3).metric_jet(std::vector<double>{0.1, 0.2, 0.3});
  for (const Jet3& j : flat)
    for (int i = 0; i < 3; ++i) CHECK(j.grad(i) == 0.0);

  const MetricField w = metric(3, {"1", "0", "0", "1", "0", "exp(2*eps*sin(x1))"}, {{"eps", 0.1}});
  const JetMatrix g = w.metric_jet(std::vector<double>{0.0, 0.0, 0.0});
  CHECK(g[8].value() == doctest::Approx(1.0));
  CHECK(g[8].grad(0) == doctest::Approx(0.2).epsilon(1e-14));

  const MetricField bad = metric(2, {"1", "0", "-1"});
  CHECK_THROWS_AS(bad.metric_jet(std::vector<double>{0.0, 0.0}), GeometryError);
  CHECK_THROWS_AS(bad.validate(4), GeometryError);
  CHECK_THROWS_AS(metric(2, {"1 + 0.1*x1", "0", "1"}).validate(4), GeometryError);
}

TEST_CASE("warped 2-torus") {
  const MetricField g = metric(2, {"1", "0", "(1 + 0.3*cos(x1))^2"});
  const std::vector<double> x = {std::numbers::pi / 2, 0.4};
  const ChristoffelField G = christoffel(g, x);
  CHECK(G.value(0, 1, 1) == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(G.value(1, 0, 1) == doctest::Approx(-0.3).epsilon(1e-13));
  CHECK(G.value(1, 1, 0) == G.value(1, 0, 1));

  const CurvatureSlot R = riemann(g, std::vector<double>{0.0, 0.4});
  const double det = R.metric[0] * R.metric[3] - R.metric[1] * R.metric[2];
  CHECK(R.lowered(0, 1, 1, 0) / det == doctest::Approx(0.3 / 1.3).epsilon(1e-12));

  // nabla_{d1} d2 = (f'/f) d2
  std::vector<Jet3> V = {Jet3(2, 0.0), Jet3(2, 1.0)};
  const auto dv = covariant_derivative_field(g, V, std::vector<double>{1.0, 0.0}, x);
  CHECK(std::abs(dv[0]) < 1e-15);
  CHECK(dv[1] == doctest::Approx(-0.3).epsilon(1e-13));
}

TEST_CASE("flat curvature is exactly zero") {
  const CurvatureSlot R = riemann(MetricField::identity(4), std::vector<double>{0.3, 1.0, 2.0, 5.0});
  for (double r : R.R) CHECK(r == 0.0);
  std::vector<Jet3> V(3, Jet3(3, 2.0));
  for (double c : covariant_derivative_field(MetricField::identity(3), V, std::vector<double>{1, 2, 3},
                                             std::vector<double>{0.1, 0.2, 0.3}))
    CHECK(c == 0.0);
}

TEST_CASE("builtin metrics: compatibility, torsion, curvature symmetries") {
  std::mt19937_64 rng(11);
  for (const auto& spec : builtin_manifolds()) {
    CAPTURE(spec.name);
    const auto s = folint::test::builtin(spec.name.c_str());
    const MetricField& g = s.metric();
    const int m = g.dim();
    double compat = 0.0, torsion = 0.0, anti = 0.0, bianchi = 0.0;
    for (int t = 0; t < 100; ++t) {
      const auto x = folint::test::random_point(rng, m);
      const JetMatrix gj = g.metric_jet(x);
      const ChristoffelField G = christoffel(g, x);
      for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            double r = gj[static_cast<std::size_t>(i * m + j)].grad(k);
            for (int l = 0; l < m; ++l)
              r -= gj[static_cast<std::size_t>(l * m + j)].value() * G.value(l, k, i) +
                   gj[static_cast<std::size_t>(i * m + l)].value() * G.value(l, k, j);
            compat = std::max(compat, std::abs(r));
            torsion = std::max(torsion, std::abs(G.value(k, i, j) - G.value(k, j, i)));
          }
      if (t % 10 == 0) {
        const CurvatureSlot R = riemann(g, x);
        anti = std::max({anti, R.max_antisymmetry_first_pair(), R.max_antisymmetry_last_pair()});
        bianchi = std::max(bianchi, R.max_bianchi());
      }
    }
    CHECK(compat < 1e-10);
    CHECK(torsion < 1e-10);
    CHECK(anti < 1e-9);
    CHECK(bianchi < 1e-9);
  }
}

TEST_CASE("metric compatibility along random fields") {
  const MetricField g = metric(3, {"1 + 0.2*sin(x2 + x3)", "0.1*cos(x1 - x3)", "0.05*sin(x1 + x2)",
                                   "1.2 + 0.15*cos(x1)*sin(x3)", "0.08*sin(x2 - x1)", "0.9 + 0.1*cos(x1 + x2 + x3)"});
  const std::vector<double> x = {0.7, 2.1, 4.0};
  const ParameterTable none;
  const auto jets = [&](std::vector<const char*> comps) {
    std::vector<Jet3> v;
    for (const char* c : comps) v.push_back(Expression::parse(c).evaluate_jet(x, none));
    return v;
  };
  const auto U = jets({"sin(x1)", "x2*cos(x3)", "1 + 0.5*x1"});
  const auto V = jets({"cos(x2 - x3)", "exp(0.2*x1)", "sin(x1 + x2)"});
  const std::vector<double> X = {0.3, -1.1, 0.6};
  const JetMatrix gj = g.metric_jet(x);
  Jet3 uv(3, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) uv += gj[static_cast<std::size_t>(i * 3 + j)] * U[i] * V[j];
  double lhs = 0.0;
  for (int k = 0; k < 3; ++k) lhs += X[k] * uv.grad(k);
  const auto du = covariant_derivative_field(g, U, X, x), dv = covariant_derivative_field(g, V, X, x);
  double rhs = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      rhs += gj[static_cast<std::size_t>(i * 3 + j)].value() * (du[i] * V[j].value() + U[i].value() * dv[j]);
  CHECK(std::abs(lhs - rhs) < 1e-10);
}

}
