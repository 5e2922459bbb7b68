#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "folint/error.hpp"
#include "folint/expr.hpp"
#include "folint/jet.hpp"

using namespace folint;

TEST_SUITE("jets") {

TEST_CASE("seed variables") {
  const double x[] = {0.5, 1.0};
  const Jet3 a = Jet3::variable(2, 0, x);
  CHECK(a.value() == 0.5);
  CHECK(a.grad(0) == 1.0);
  CHECK(a.grad(1) == 0.0);
  CHECK(a.hess(0, 0) == 0.0);
  CHECK(a.third(0, 0, 0) == 0.0);
  const Jet3 b = Jet3::variable(2, 1, x);
  CHECK(b.value() == 1.0);
  CHECK(b.grad(1) == 1.0);
  CHECK_THROWS_AS(Jet3::variable(2, 2, x), InputError);
}

TEST_CASE("arithmetic rules") {
  const double x3[] = {3.0};
  const Jet3 x = Jet3::variable(1, 0, x3);
  const Jet3 sq = x * x;
  CHECK(sq.value() == 9.0);
  CHECK(sq.grad(0) == 6.0);
  CHECK(sq.hess(0, 0) == 2.0);
  CHECK(sq.third(0, 0, 0) == 0.0);

  const double x2[] = {2.0};
  const Jet3 inv = 1.0 / Jet3::variable(1, 0, x2);
  CHECK(inv.value() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(inv.grad(0) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(inv.hess(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(inv.third(0, 0, 0) == doctest::Approx(-0.375).epsilon(1e-15));

  const double p[] = {0.3, -1.2};
  const Jet3 a = sin(Jet3::variable(2, 0, p)) * Jet3::variable(2, 1, p);
  const Jet3 b = exp(Jet3::variable(2, 1, p));
  const Jet3 c = (a + b) - b;
  CHECK(std::abs(c.value() - a.value()) < 1e-15);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(c.grad(i) - a.grad(i)) < 1e-15);

  CHECK_THROWS_AS(Jet3::variable(1, 0, x3) + Jet3::variable(2, 0, p), InputError);
  CHECK_THROWS_AS(x / Jet3(1, 0.0), SingularityError);
}

TEST_CASE("elementary functions") {
  const double z[] = {0.0};
  const Jet3 x = Jet3::variable(1, 0, z);
  const Jet3 s = sin(x);
  CHECK(s.value() == 0.0);
  CHECK(s.grad(0) == 1.0);
  CHECK(s.hess(0, 0) == 0.0);
  CHECK(s.third(0, 0, 0) == -1.0);
  const Jet3 e = exp(x);
  CHECK(e.value() == 1.0);
  CHECK(e.grad(0) == 1.0);
  CHECK(e.hess(0, 0) == 1.0);
  CHECK(e.third(0, 0, 0) == 1.0);
  const double neg[] = {-1.0};
  CHECK_THROWS_AS(log(Jet3::variable(1, 0, neg)), SingularityError);
  CHECK_THROWS_AS(sqrt(Jet3::variable(1, 0, neg)), SingularityError);
}

TEST_CASE("symmetry of stored derivatives") {
  const double p[] = {0.4, 1.1, -0.7};
  const Jet3 x = Jet3::variable(3, 0, p), y = Jet3::variable(3, 1, p), w = Jet3::variable(3, 2, p);
  const Jet3 f = exp(x * y) * cos(w - x) / (2.0 + sin(y));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(f.hess(i, j) == f.hess(j, i));
      for (int k = 0; k < 3; ++k) {
        CHECK(f.third(i, j, k) == f.third(j, k, i));
        CHECK(f.third(i, j, k) == f.third(k, j, i));
      }
    }
  CHECK(f.is_finite());
}

namespace {

std::string random_expression(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  const auto num = [&] { return std::to_string(std::round(coef(rng) * 100.0) / 100.0); };
  switch (pick(rng)) {
    case 0: return "x" + std::to_string(1 + static_cast<int>(rng() % 3));
    case 1: return "(" + num() + ")";
    case 2: return "(" + random_expression(rng, depth - 1) + " + " + random_expression(rng, depth - 1) + ")";
    case 3: return "(" + random_expression(rng, depth - 1) + " * " + random_expression(rng, depth - 1) + ")";
    case 4: return "sin(" + random_expression(rng, depth - 1) + ")";
    case 5: return "cos(" + random_expression(rng, depth - 1) + ")";
    case 6: return "exp(0.5*" + random_expression(rng, depth - 1) + ")";
    default: return "(" + random_expression(rng, depth - 1) + ")/(2.5 + sin(" + random_expression(rng, depth - 1) + "))";
  }
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("derivatives agree with central differences") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ParameterTable none;
  const double h = 1e-4;
  for (int t = 0; t < 100; ++t) {
    const Expression e = Expression::parse(random_expression(rng, 4));
    const std::vector<double> x = {u(rng), u(rng), u(rng)};
    const Jet3 j = e.evaluate_jet(x, none);
    const auto f = [&](int a, double da, int b, double db) {
      std::vector<double> y = x;
      y[static_cast<std::size_t>(a)] += da;
      y[static_cast<std::size_t>(b)] += db;
      return e.evaluate(y, none);
    };
    for (int i = 0; i < 3; ++i) {
      const double g = (f(i, h, i, 0) - f(i, -h, i, 0)) / (2 * h);
      CHECK(rel(j.grad(i), g) < 1e-6);
      for (int k = 0; k < 3; ++k) {
        const double hk = (f(i, h, k, h) - f(i, h, k, -h) - f(i, -h, k, h) + f(i, -h, k, -h)) / (4 * h * h);
        CHECK(rel(j.hess(i, k), hk) < 1e-6);
      }
    }
  }
}

TEST_CASE("chain rule through a product") {
  const double p[] = {0.7, -0.4};
  const Jet3 a = Jet3::variable(2, 0, p), b = Jet3::variable(2, 1, p);
  const Jet3 f = sin(a * b);
  const double ab = 0.7 * -0.4;
  CHECK(std::abs(f.value() - std::sin(ab)) < 1e-15);
  CHECK(std::abs(f.grad(0) - std::cos(ab) * -0.4) < 1e-15);
  CHECK(std::abs(f.grad(1) - std::cos(ab) * 0.7) < 1e-15);
  CHECK(std::abs(f.hess(0, 0) + std::sin(ab) * 0.16) < 1e-15);
  CHECK(std::abs(f.hess(0, 1) - (std::cos(ab) - std::sin(ab) * ab)) < 1e-15);
  CHECK(std::abs(f.third(0, 0, 0) + std::cos(ab) * -0.064) < 1e-15);
}

}
