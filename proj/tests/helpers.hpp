#pragma once

#include <random>
#include <vector>

#include "folint/cli.hpp"

namespace folint::test {

inline std::vector<double> random_point(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::vector<double> x(static_cast<std::size_t>(m));
  for (double& c : x) c = u(rng);
  return x;
}

inline std::vector<double> random_unit(std::mt19937_64& rng, int p) {
  std::normal_distribution<double> g;
  std::vector<double> y(static_cast<std::size_t>(p));
  double s = 0.0;
  for (double& c : y) {
    c = g(rng);
    s += c * c;
  }
  for (double& c : y) c /= std::sqrt(s);
  return y;
}

inline SubRiemannianStructure builtin(const char* name) { return build_structure(builtin_manifold(name)); }

inline MetricField metric(int m, std::vector<const char*> upper, ParameterTable params = {}) {
  std::vector<Expression> e;
  for (const char* s : upper) e.push_back(Expression::parse(s));
  return MetricField(m, std::move(e), std::move(params));
}

inline VectorExpr field(std::vector<const char*> comps) {
  VectorExpr v;
  for (const char* s : comps) v.push_back(Expression::parse(s));
  return v;
}

// Keeps m = 4 quadrature affordable in unit tests.
inline CheckOptions small_options(const SubRiemannianStructure& s) {
  CheckOptions o;
  o.grid = {s.dim() == 4 ? 6 : s.dim() == 3 ? 10 : 16};
  o.sphere = 8;
  o.probe.resolution = 4;
  return o;
}

}  // namespace folint::test
