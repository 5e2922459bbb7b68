#pragma once

// First-order jet expressed in an adapted frame: a value and its derivatives
// along the frame fields e_0..e_{m-1} at one point. All per-normal-direction
// quantities are carried in this form.

#include <array>

#include "folint/error.hpp"

namespace folint {

struct FrameJet {
  static constexpr int kMaxDirections = 4;

  double v = 0.0;
  std::array<double, kMaxDirections> d{};

  FrameJet() = default;
  FrameJet(double value) : v(value) {}  // NOLINT: constants promote implicitly

  double D(int alpha) const { return d[static_cast<std::size_t>(alpha)]; }

  FrameJet operator-() const {
    FrameJet r;
    r.v = -v;
    for (int i = 0; i < kMaxDirections; ++i) r.d[i] = -d[i];
    return r;
  }
  FrameJet& operator+=(const FrameJet& b) {
    v += b.v;
    for (int i = 0; i < kMaxDirections; ++i) d[i] += b.d[i];
    return *this;
  }
  FrameJet& operator-=(const FrameJet& b) {
    v -= b.v;
    for (int i = 0; i < kMaxDirections; ++i) d[i] -= b.d[i];
    return *this;
  }
  FrameJet& operator*=(double c) {
    v *= c;
    for (auto& x : d) x *= c;
    return *this;
  }
  FrameJet& operator*=(const FrameJet& b) {
    for (int i = 0; i < kMaxDirections; ++i) d[i] = d[i] * b.v + v * b.d[i];
    v *= b.v;
    return *this;
  }

  friend FrameJet operator+(FrameJet a, const FrameJet& b) { return a += b; }
  friend FrameJet operator-(FrameJet a, const FrameJet& b) { return a -= b; }
  friend FrameJet operator*(FrameJet a, const FrameJet& b) { return a *= b; }
  friend FrameJet operator*(FrameJet a, double c) { return a *= c; }
  friend FrameJet operator*(double c, FrameJet a) { return a *= c; }
  friend FrameJet operator/(const FrameJet& a, const FrameJet& b) {
    if (b.v == 0.0) throw SingularityError("division by a frame jet with zero value");
    FrameJet r;
    r.v = a.v / b.v;
    const double inv2 = 1.0 / (b.v * b.v);
    for (int i = 0; i < kMaxDirections; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
    return r;
  }
};

inline double value_of(double x) { return x; }
inline double value_of(const FrameJet& x) { return x.v; }

}  // namespace folint
