#pragma once

// Truncated multivariate Taylor arithmetic (total order 3) over at most four
// chart variables. Derivatives are stored raw (not divided by factorials) in
// symmetric-reduced form. Every jet carries the number of derivative orders it
// knows exactly; differentiation lowers it by one and arithmetic keeps the
// minimum of its operands, so a quantity never claims more accuracy than the
// data it was built from.

#include <array>
#include <cmath>
#include <span>

#include "folint/error.hpp"

namespace folint {

inline constexpr int kMaxChartDim = 4;

namespace detail {

struct JetIndexTables {
  // pair[d][i][j] and triple[d][i][j][k]: packed slot for chart dimension d.
  int pair[kMaxChartDim + 1][kMaxChartDim][kMaxChartDim]{};
  int triple[kMaxChartDim + 1][kMaxChartDim][kMaxChartDim][kMaxChartDim]{};
  int pair_count[kMaxChartDim + 1]{};
  int triple_count[kMaxChartDim + 1]{};

  constexpr JetIndexTables() {
    for (int d = 1; d <= kMaxChartDim; ++d) {
      int c = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          pair[d][i][j] = c;
          pair[d][j][i] = c;
          ++c;
        }
      pair_count[d] = c;
      c = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
          for (int k = j; k < d; ++k) {
            const int perm[6][3] = {{i, j, k}, {i, k, j}, {j, i, k},
                                    {j, k, i}, {k, i, j}, {k, j, i}};
            for (const auto& q : perm) triple[d][q[0]][q[1]][q[2]] = c;
            ++c;
          }
      triple_count[d] = c;
    }
  }
};

inline constexpr JetIndexTables kJetIndex{};

}  // namespace detail

class Jet3 {
 public:
  static constexpr int kMaxOrder = 3;
  static constexpr int kPairSlots = 10;
  static constexpr int kTripleSlots = 20;

  Jet3() = default;

  /// Constant jet (all derivatives exactly zero).
  Jet3(int dim, double value, int order = kMaxOrder) : dim_(dim), order_(order), value_(value) {
    if (dim < 1 || dim > kMaxChartDim) throw InputError("jet dimension must be in 1..4");
    if (order < 0 || order > kMaxOrder) throw InputError("jet order must be in 0..3");
  }

  static Jet3 constant(int dim, double value) { return Jet3(dim, value); }

  /// Coordinate jet x_index expanded at `point`.
  static Jet3 variable(int dim, int index, std::span<const double> point) {
    if (index < 0 || index >= dim) throw InputError("coordinate index out of range for jet");
    if (static_cast<int>(point.size()) < dim) throw InputError("point has fewer coordinates than jet dimension");
    Jet3 r(dim, point[static_cast<std::size_t>(index)]);
    r.grad_[static_cast<std::size_t>(index)] = 1.0;
    return r;
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  double value() const { return value_; }
  double grad(int i) const { return grad_[static_cast<std::size_t>(i)]; }
  double hess(int i, int j) const { return hess_[static_cast<std::size_t>(detail::kJetIndex.pair[dim_][i][j])]; }
  double third(int i, int j, int k) const {
    return third_[static_cast<std::size_t>(detail::kJetIndex.triple[dim_][i][j][k])];
  }

  void set_value(double v) { value_ = v; }
  void set_grad(int i, double v) { grad_[static_cast<std::size_t>(i)] = v; }
  void set_hess(int i, int j, double v) { hess_[static_cast<std::size_t>(detail::kJetIndex.pair[dim_][i][j])] = v; }
  void set_third(int i, int j, int k, double v) {
    third_[static_cast<std::size_t>(detail::kJetIndex.triple[dim_][i][j][k])] = v;
  }

  /// Partial derivative along a chart axis; one derivative order is consumed.
  Jet3 derivative(int axis) const {
    if (axis < 0 || axis >= dim_) throw InputError("derivative axis out of range");
    if (order_ < 1) throw InputError("jet has no derivative information left");
    Jet3 r(dim_, grad_[static_cast<std::size_t>(axis)], order_ - 1);
    if (r.order_ >= 1)
      for (int i = 0; i < dim_; ++i) r.grad_[static_cast<std::size_t>(i)] = hess(axis, i);
    if (r.order_ >= 2)
      for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) r.set_hess(i, j, third(axis, i, j));
    return r;
  }

  /// Copy with derivative information above `order` discarded.
  Jet3 truncated(int order) const {
    Jet3 r = *this;
    r.lower_order(order);
    return r;
  }

  bool is_finite() const {
    if (!std::isfinite(value_)) return false;
    for (int i = 0; i < dim_; ++i)
      if (!std::isfinite(grad_[static_cast<std::size_t>(i)])) return false;
    for (int s = 0; s < detail::kJetIndex.pair_count[dim_]; ++s)
      if (!std::isfinite(hess_[static_cast<std::size_t>(s)])) return false;
    for (int s = 0; s < detail::kJetIndex.triple_count[dim_]; ++s)
      if (!std::isfinite(third_[static_cast<std::size_t>(s)])) return false;
    return true;
  }

  Jet3 operator-() const {
    Jet3 r = *this;
    r.value_ = -value_;
    for (auto& v : r.grad_) v = -v;
    for (auto& v : r.hess_) v = -v;
    for (auto& v : r.third_) v = -v;
    return r;
  }

  Jet3& operator+=(const Jet3& b) {
    check_dim(b);
    lower_order(b.order_);
    value_ += b.value_;
    for (int i = 0; i < dim_; ++i) grad_[static_cast<std::size_t>(i)] += b.grad_[static_cast<std::size_t>(i)];
    for (int s = 0; s < kPairSlots; ++s) hess_[static_cast<std::size_t>(s)] += b.hess_[static_cast<std::size_t>(s)];
    for (int s = 0; s < kTripleSlots; ++s) third_[static_cast<std::size_t>(s)] += b.third_[static_cast<std::size_t>(s)];
    clear_above_order();
    return *this;
  }
  Jet3& operator-=(const Jet3& b) {
    check_dim(b);
    lower_order(b.order_);
    value_ -= b.value_;
    for (int i = 0; i < dim_; ++i) grad_[static_cast<std::size_t>(i)] -= b.grad_[static_cast<std::size_t>(i)];
    for (int s = 0; s < kPairSlots; ++s) hess_[static_cast<std::size_t>(s)] -= b.hess_[static_cast<std::size_t>(s)];
    for (int s = 0; s < kTripleSlots; ++s) third_[static_cast<std::size_t>(s)] -= b.third_[static_cast<std::size_t>(s)];
    clear_above_order();
    return *this;
  }
  Jet3& operator+=(double c) {
    value_ += c;
    return *this;
  }
  Jet3& operator-=(double c) {
    value_ -= c;
    return *this;
  }
  Jet3& operator*=(double c) {
    value_ *= c;
    for (auto& v : grad_) v *= c;
    for (auto& v : hess_) v *= c;
    for (auto& v : third_) v *= c;
    return *this;
  }
  Jet3& operator*=(const Jet3& b) {
    *this = multiply(*this, b);
    return *this;
  }
  Jet3& operator/=(const Jet3& b) {
    *this = divide(*this, b);
    return *this;
  }

  friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
  friend Jet3 operator*(const Jet3& a, const Jet3& b) { return multiply(a, b); }
  friend Jet3 operator/(const Jet3& a, const Jet3& b) { return divide(a, b); }
  friend Jet3 operator+(Jet3 a, double c) { return a += c; }
  friend Jet3 operator+(double c, Jet3 a) { return a += c; }
  friend Jet3 operator-(Jet3 a, double c) { return a -= c; }
  friend Jet3 operator-(double c, const Jet3& a) { return (-a) += c; }
  friend Jet3 operator*(Jet3 a, double c) { return a *= c; }
  friend Jet3 operator*(double c, Jet3 a) { return a *= c; }
  friend Jet3 operator/(Jet3 a, double c) {
    if (c == 0.0) throw SingularityError("division of jet by zero");
    return a *= (1.0 / c);
  }
  friend Jet3 operator/(double c, const Jet3& a) { return divide(Jet3(a.dim_, c), a); }

  /// Composition phi(a) given phi and its first three derivatives at a.value().
  friend Jet3 compose(const Jet3& a, double d0, double d1, double d2, double d3) {
    Jet3 r(a.dim_, d0, a.order_);
    const int d = a.dim_;
    if (a.order_ >= 1)
      for (int i = 0; i < d; ++i) r.grad_[static_cast<std::size_t>(i)] = d1 * a.grad_[static_cast<std::size_t>(i)];
    if (a.order_ >= 2) {
      int s = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j, ++s)
          r.hess_[static_cast<std::size_t>(s)] =
              d2 * a.grad(i) * a.grad(j) + d1 * a.hess_[static_cast<std::size_t>(s)];
    }
    if (a.order_ >= 3) {
      int s = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
          for (int k = j; k < d; ++k, ++s) {
            const double fi = a.grad(i), fj = a.grad(j), fk = a.grad(k);
            r.third_[static_cast<std::size_t>(s)] =
                d3 * fi * fj * fk + d2 * (a.hess(i, j) * fk + a.hess(i, k) * fj + a.hess(j, k) * fi) +
                d1 * a.third_[static_cast<std::size_t>(s)];
          }
    }
    return r;
  }

 private:
  void check_dim(const Jet3& b) const {
    if (b.dim_ != dim_) throw InputError("jet dimension mismatch");
  }
  void lower_order(int order) {
    if (order < order_) {
      order_ = order;
      clear_above_order();
    }
  }
  void clear_above_order() {
    if (order_ < 3) third_.fill(0.0);
    if (order_ < 2) hess_.fill(0.0);
    if (order_ < 1) grad_.fill(0.0);
  }

  static Jet3 multiply(const Jet3& f, const Jet3& g) {
    f.check_dim(g);
    const int d = f.dim_;
    Jet3 r(d, f.value_ * g.value_, f.order_ < g.order_ ? f.order_ : g.order_);
    const double f0 = f.value_, g0 = g.value_;
    if (r.order_ >= 1)
      for (int i = 0; i < d; ++i)
        r.grad_[static_cast<std::size_t>(i)] = f.grad(i) * g0 + f0 * g.grad(i);
    if (r.order_ >= 2) {
      int s = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j, ++s)
          r.hess_[static_cast<std::size_t>(s)] = f.hess_[static_cast<std::size_t>(s)] * g0 + f.grad(i) * g.grad(j) +
                                                 f.grad(j) * g.grad(i) + f0 * g.hess_[static_cast<std::size_t>(s)];
    }
    if (r.order_ >= 3) {
      int s = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
          for (int k = j; k < d; ++k, ++s)
            r.third_[static_cast<std::size_t>(s)] =
                f.third_[static_cast<std::size_t>(s)] * g0 + f.hess(i, j) * g.grad(k) + f.hess(i, k) * g.grad(j) +
                f.hess(j, k) * g.grad(i) + f.grad(i) * g.hess(j, k) + f.grad(j) * g.hess(i, k) +
                f.grad(k) * g.hess(i, j) + f0 * g.third_[static_cast<std::size_t>(s)];
    }
    return r;
  }

  static Jet3 divide(const Jet3& a, const Jet3& b) {
    a.check_dim(b);
    if (b.value_ == 0.0) throw SingularityError("division by a jet with zero value");
    const double v = b.value_;
    const double inv = 1.0 / v;
    Jet3 r = multiply(a, compose(b, inv, -inv * inv, 2.0 * inv * inv * inv, -6.0 * inv * inv * inv * inv));
    r.value_ = a.value_ / b.value_;
    return r;
  }

  int dim_ = 1;
  int order_ = kMaxOrder;
  double value_ = 0.0;
  std::array<double, kMaxChartDim> grad_{};
  std::array<double, kPairSlots> hess_{};
  std::array<double, kTripleSlots> third_{};
};

Jet3 sin(const Jet3& a);
Jet3 cos(const Jet3& a);
Jet3 exp(const Jet3& a);
Jet3 log(const Jet3& a);
Jet3 sqrt(const Jet3& a);
/// a^c for a constant exponent; integer exponents use exact repeated products.
Jet3 pow(const Jet3& a, double c);

/// Directional derivative sum_i dir[i] * d_i f.
template <class Dir>
Jet3 directional(const Jet3& f, const Dir& dir) {
  Jet3 r(f.dim(), 0.0, f.order() - 1);
  for (int i = 0; i < f.dim(); ++i) r += dir[static_cast<std::size_t>(i)] * f.derivative(i);
  return r;
}

}  // namespace folint
