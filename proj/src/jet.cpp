#include "folint/jet.hpp"

#include <cmath>

namespace folint {

Jet3 sin(const Jet3& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose(a, s, c, -s, -c);
}

Jet3 cos(const Jet3& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose(a, c, -s, -c, s);
}

Jet3 exp(const Jet3& a) {
  const double e = std::exp(a.value());
  return compose(a, e, e, e, e);
}

Jet3 log(const Jet3& a) {
  const double v = a.value();
  if (!(v > 0.0)) throw SingularityError("log of non-positive value");
  const double inv = 1.0 / v;
  return compose(a, std::log(v), inv, -inv * inv, 2.0 * inv * inv * inv);
}

Jet3 sqrt(const Jet3& a) {
  const double v = a.value();
  if (!(v > 0.0)) throw SingularityError("sqrt of non-positive value");
  const double s = std::sqrt(v);
  return compose(a, s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v));
}

namespace {

Jet3 integer_power(const Jet3& a, long long e) {
  Jet3 result(a.dim(), 1.0, a.order());
  Jet3 base = a;
  bool first = true;
  while (e > 0) {
    if (e & 1) {
      result = first ? base : result * base;
      first = false;
    }
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

}  // namespace

Jet3 pow(const Jet3& a, double c) {
  if (c == std::floor(c) && std::abs(c) <= 64.0) {
    const auto e = static_cast<long long>(c);
    if (e == 0) return Jet3(a.dim(), 1.0, a.order());
    if (e > 0) return integer_power(a, e);
    if (a.value() == 0.0) throw SingularityError("negative power of zero");
    return 1.0 / integer_power(a, -e);
  }
  const double v = a.value();
  if (!(v > 0.0)) throw SingularityError("non-integer power of non-positive value");
  const double p0 = std::pow(v, c);
  return compose(a, p0, c * p0 / v, c * (c - 1.0) * p0 / (v * v), c * (c - 1.0) * (c - 2.0) * p0 / (v * v * v));
}

}  // namespace folint
