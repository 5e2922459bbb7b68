#include <doctest.h>

#include <cmath>
#include <random>

#include "folint/error.hpp"
#include "folint/invariants.hpp"
#include "newton_identities.hpp"

using namespace folint;

namespace {

SquareMatrix<double> diag(std::vector<double> d) {
  SquareMatrix<double> a(static_cast<int>(d.size()));
  for (int i = 0; i < a.size(); ++i) a(i, i) = d[static_cast<std::size_t>(i)];
  return a;
}

}  // namespace

TEST_SUITE("invariants") {

TEST_CASE("power sums and elementary functions") {
  const auto A = diag({1, 2, 3});
  CHECK(tau(A, 2) == 14.0);
  CHECK(tau(SquareMatrix<double>(3), 4) == 0.0);
  CHECK(tau(SquareMatrix<double>::identity(3), 5) == 3.0);
  const auto s = sigmas(A);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(s[2] == doctest::Approx(11.0).epsilon(1e-15));
  CHECK(s[3] == doctest::Approx(6.0).epsilon(1e-15));
  for (int r = 1; r <= 3; ++r) CHECK(sigma(SquareMatrix<double>(3), r) == 0.0);
  CHECK_THROWS_AS(sigma(A, 4), InputError);
  CHECK_THROWS_AS(sigma(A, -1), InputError);
}

TEST_CASE("newton transformations") {
  const auto A = diag({1, 2, 3});
  CHECK(max_abs_difference(newton_transform(A, 1), diag({5, 4, 3})) < 1e-14);
  CHECK(max_abs_difference(newton_transform(A, 0), SquareMatrix<double>::identity(3)) == 0.0);
  CHECK(max_abs(newton_transform(A, 3)) < 1e-13);
  CHECK_THROWS_AS(newton_transform(A, 4), InputError);
}

TEST_CASE("general transforms") {
  const auto A = diag({1, 2, 3});
  for (int r = 0; r < 3; ++r)
    CHECK(max_abs_difference(general_transform(A, CoefficientRecipe::newton(r, 3)), newton_transform(A, r)) < 1e-13);
  CHECK(max_abs_difference(general_transform(A, CoefficientRecipe::parse("1; 0; 0", 3)),
                           SquareMatrix<double>::identity(3)) == 0.0);
  CHECK(max_abs_difference(general_transform(A, CoefficientRecipe::parse("0; 0; 1", 3)), diag({1, 4, 9})) == 0.0);
  CHECK_THROWS_AS(CoefficientRecipe::parse("1; 0", 3), InputError);
  CHECK_THROWS_AS(general_transform(A, CoefficientRecipe::parse("log(t1 - 100); 0; 0", 3)), SingularityError);
}

TEST_CASE("Newton transformation identities on random matrices") {
  const auto worst = folint::test::newton_identity_errors(42, 1000);
  for (int i = 0; i < 5; ++i) {
    CAPTURE(i);
    CHECK(worst[static_cast<std::size_t>(i)] < 1e-10);
  }
}

TEST_CASE("jet derivatives of sigma and tau match central differences") {
  std::mt19937_64 rng(43);
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 5;
    const auto A = folint::test::random_symmetric(rng, n);
    const auto A1 = folint::test::random_symmetric(rng, n);
    auto Ap = A, Am = A;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Ap(i, j) += h * A1(i, j);
        Am(i, j) -= h * A1(i, j);
      }
    const auto sp = sigmas(Ap), sm = sigmas(Am);
    for (int r = 1; r <= n; ++r) {
      const double lhs = trace_product(newton_transform(A, r - 1), A1);
      const double fd = (sp[static_cast<std::size_t>(r)] - sm[static_cast<std::size_t>(r)]) / (2 * h);
      CHECK(folint::test::relative_to(lhs, fd, std::abs(lhs)) < 1e-7);
    }
    auto Ak = SquareMatrix<double>::identity(n);
    for (int k = 1; k <= n + 2; ++k) {
      const double lhs = k * trace_product(Ak, A1);
      CHECK(folint::test::relative_to(lhs, (tau(Ap, k) - tau(Am, k)) / (2 * h), std::abs(lhs)) < 1e-7);
      Ak = Ak * A;
    }
  }
}

}
