#pragma once

// Grammar corpus shared by the unit tests and the acceptance runner.
// Positive cases are evaluated at kCorpusPoint with kCorpusParams.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace folint::corpus {

inline constexpr std::array<double, 4> kCorpusPoint = {0.5, 1.0, -0.3, 2.0};

struct Positive {
  const char* text;
  double expected;
};

struct Negative {
  const char* text;
  std::size_t offset;
};

inline const std::array<Positive, 30>& positives() {
  static const std::array<Positive, 30> cases = {{
      {"1 + eps*cos(x1)", 1.0 + 0.3 * std::cos(0.5)},
      {"2^3^2", 64.0},
      {"-x1^2", -0.25},
      {"x1 - x2 - x3", -0.2},
      {"x1 / x2 / 4", 0.125},
      {"exp(0*x1)", 1.0},
      {"sin(x1)^2 + cos(x1)^2", 1.0},
      {"sqrt(x4)", std::numbers::sqrt2},
      {"log(x4)", std::numbers::ln2},
      {"  ( x1 + x2 ) * x3 ", -0.45},
      {"x1*x2*x3*x4", -0.3},
      {"a*x1 + a^2", 5.0},
      {"1e-3*x2", 1e-3},
      {"2.5E+1", 25.0},
      {"x4^0.5", std::numbers::sqrt2},
      {"-(-x1)", 0.5},
      {"cos(sin(exp(x3)))", std::cos(std::sin(std::exp(-0.3)))},
      {"x1*-x2", -0.5},
      {"eps_2 + 1", 1.5},
      {"exp(2*eps*sin(x1))", std::exp(0.6 * std::sin(0.5))},
      {"1/(1+x1^2)", 0.8},
      {"(x1+x2)^2", 2.25},
      {"3 - -x1", 3.5},
      {"x2^3 - 3*x2 + 2", 0.0},
      {"sqrt(x1^2 + x2^2)", std::sqrt(1.25)},
      {"0.1*cos(x1 - x3) + 0.05*sin(x1 + x2)", 0.1 * std::cos(0.8) + 0.05 * std::sin(1.5)},
      {"2*x1^2/x4", 0.25},
      {"exp(log(x4))", 2.0},
      {"(((x2)))", 1.0},
      {"x4^1.5", 2.0 * std::numbers::sqrt2},
  }};
  return cases;
}

inline const std::array<Negative, 20>& negatives() {
  static const std::array<Negative, 20> cases = {{
      {"sin(x1", 6},
      {"", 0},
      {"1 +", 3},
      {"* x1", 0},
      {"x1 $ 2", 3},
      {"(x1 + x2", 8},
      {"x1 + x2)", 7},
      {"foo(x1)", 0},
      {"x1^x2", 3},
      {"2^(3)", 2},
      {"sin()", 4},
      {"x1 x2", 3},
      {"1..2", 0},
      {"--x1", 1},
      {"()", 1},
      {"x1 + * x2", 5},
      {"3 + 4)", 5},
      {"x1 # x2", 3},
      {"sqrt(x1,x2)", 7},
      {"x1^", 3},
  }};
  return cases;
}

}  // namespace folint::corpus
