#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "folint/error.hpp"
#include "folint/quadrature.hpp"
#include "helpers.hpp"

using namespace folint;

namespace {

// All multi-indices of length p with |lambda| <= 4.
std::vector<std::vector<int>> low_moments(int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> l(static_cast<std::size_t>(p), 0);
  const auto rec = [&](auto&& self, int a, int left) -> void {
    if (a == p) {
      out.push_back(l);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      l[static_cast<std::size_t>(a)] = e;
      self(self, a + 1, left - e);
    }
  };
  rec(rec, 0, 4);
  return out;
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("moment integrals") {
  const int zero2[] = {0, 0}, two0[] = {2, 0}, odd[] = {1, 2};
  CHECK(std::abs(moment_integral(zero2) - 2 * std::numbers::pi) < 1e-13);
  CHECK(std::abs(moment_integral(two0) - std::numbers::pi) < 1e-14);
  CHECK(moment_integral(odd) == 0.0);
  const int neg[] = {-1};
  CHECK_THROWS_AS(moment_integral(neg), InputError);
}

TEST_CASE("sphere schemes reproduce the moments") {
  for (int p = 1; p <= 3; ++p) {
    CAPTURE(p);
    for (int res : {8, 16, 32}) {
      const SphereScheme sph(p, res);
      CHECK(std::abs(sph.total_weight() - sphere_volume(p)) < 1e-12);
      for (const auto& l : low_moments(p)) {
        CAPTURE(l[0]);
        const double q = integrate_fiber(
            [&](std::span<const double> y) {
              double v = 1.0;
              for (int a = 0; a < p; ++a) v *= std::pow(y[static_cast<std::size_t>(a)], l[static_cast<std::size_t>(a)]);
              return v;
            },
            sph);
        CHECK(std::abs(q - moment_integral(l)) < 1e-10);
      }
      // antipodal symmetry
      for (std::size_t k = 0; k < sph.size(); ++k) {
        bool found = false;
        for (std::size_t j = 0; j < sph.size() && !found; ++j) {
          double d = 0.0;
          for (int a = 0; a < p; ++a) d = std::max(d, std::abs(sph.node(k)[a] + sph.node(j)[a]));
          found = d < 1e-15 && sph.weight(j) == sph.weight(k);
        }
        CHECK(found);
      }
    }
  }
  CHECK_THROWS_AS(SphereScheme(4, 8), InputError);
  CHECK_THROWS_AS(SphereScheme(2, 5), InputError);
}

TEST_CASE("torus integration") {
  const MetricField flat2 = MetricField::identity(2);
  const GridScheme g16 = GridScheme::uniform(2, 16);
  CHECK(integrate_torus([](std::span<const double>) { return 1.0; }, flat2, g16) == doctest::Approx(4 * std::numbers::pi * std::numbers::pi).epsilon(1e-15));
  CHECK(std::abs(integrate_torus([](std::span<const double> x) { return std::sin(x[0]); }, flat2, g16)) < 1e-14);
  const MetricField w = folint::test::metric(2, {"1", "0", "(1 + 0.3*cos(x1))^2"});
  CHECK(std::abs(integrate_torus([](std::span<const double>) { return 1.0; }, w, g16) - 4 * std::numbers::pi * std::numbers::pi) < 1e-12);
  CHECK_THROWS_AS(GridScheme::uniform(2, 3), InputError);
  CHECK_THROWS_AS(integrate_torus([](std::span<const double>) { return 1.0; }, flat2, GridScheme::uniform(3, 4)), InputError);
}

TEST_CASE("leaf integration") {
  const auto flat = SubRiemannianStructure("flat", MetricField::identity(3), 1, 1);
  const std::vector<double> base = {0.0, 1.0, 2.0};
  const GridScheme leaf = GridScheme::uniform(1, 16);
  CHECK(integrate_leaf([](std::span<const double>) { return 1.0; }, flat, base, leaf) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
  CHECK(std::abs(integrate_leaf([](std::span<const double> x) { return std::sin(x[0]); }, flat, base, leaf)) < 1e-13);
  // leaves along x1 of exp(2 eps sin x2) dx1^2 + dx2^2 have length 2 pi exp(eps sin x2)
  const auto w = folint::test::builtin("warped-surface");
  const std::vector<double> b = {0.0, 1.3};
  CHECK(integrate_leaf([](std::span<const double>) { return 1.0; }, w, b, leaf) ==
        doctest::Approx(2 * std::numbers::pi * std::exp(0.2 * std::sin(1.3))).epsilon(1e-14));
}

TEST_CASE("bundle integration") {
  const auto s = folint::test::builtin("full-tangent-3");
  const GridScheme g = GridScheme::uniform(3, 8);
  const SphereScheme sph(2, 16);
  const double vol = integrate_torus([](std::span<const double>) { return 1.0; }, s.metric(), g);
  CHECK(std::abs(integrate_bundle([](auto, auto) { return 1.0; }, s, g, sph) - 2 * std::numbers::pi * vol) < 1e-11);
  CHECK(std::abs(integrate_bundle([](auto, std::span<const double> y) { return y[0] * y[1]; }, s, g, sph)) < 1e-12);
  CHECK(std::abs(integrate_bundle([](std::span<const double> x, std::span<const double> y) { return y[0] * std::cos(x[1]) + y[1] * y[1] * y[1]; }, s, g, sph)) < 1e-12);
}

TEST_CASE("periodic quadrature converges spectrally") {
  const MetricField w = folint::test::metric(2, {"1", "0", "exp(0.4*sin(x1))"});
  const auto f = [](std::span<const double> x) { return std::exp(std::sin(x[1]) + 0.5 * std::cos(x[0])); };
  const double a = integrate_torus(f, w, GridScheme::uniform(2, 16));
  const double b = integrate_torus(f, w, GridScheme::uniform(2, 32));
  const double c = integrate_torus(f, w, GridScheme::uniform(2, 64));
  const double coarse = integrate_torus(f, w, GridScheme::uniform(2, 4));
  CHECK(std::abs(coarse - c) > 1e-6);
  CHECK(std::abs(a - b) < 1e-10);
  CHECK(std::abs(b - c) < 1e-10);
}

TEST_CASE("parallel accumulation is deterministic") {
  const auto rows = parallel_evaluate(1000, [](long long k) { return std::vector<double>{std::sin(0.1 * k)}; });
  REQUIRE(rows.size() == 1000);
  for (long long k = 0; k < 1000; ++k) CHECK(rows[k][0] == std::sin(0.1 * k));
  CHECK_THROWS_AS(parallel_evaluate(10, [](long long k) -> std::vector<double> {
                    if (k == 7) throw GeometryError("boom");
                    return {0.0};
                  }),
                  GeometryError);
}

}
