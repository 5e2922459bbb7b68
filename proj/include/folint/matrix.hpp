#pragma once

// Small dense square matrices over a scalar type (double or FrameJet).

#include <cstddef>
#include <vector>

#include "folint/error.hpp"
#include "folint/frame_jet.hpp"

namespace folint {

template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n, const T& fill = T(0.0)) : n_(n), a_(static_cast<std::size_t>(n * n), fill) {
    if (n < 0) throw InputError("matrix size must be non-negative");
  }

  static SquareMatrix identity(int n) {
    SquareMatrix r(n);
    for (int i = 0; i < n; ++i) r(i, i) = T(1.0);
    return r;
  }

  int size() const { return n_; }
  T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }

  T trace() const {
    T t(0.0);
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  SquareMatrix transposed() const {
    SquareMatrix r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  SquareMatrix& operator+=(const SquareMatrix& b) {
    check(b);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += b.a_[k];
    return *this;
  }
  SquareMatrix& operator-=(const SquareMatrix& b) {
    check(b);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= b.a_[k];
    return *this;
  }
  template <class S>
  SquareMatrix& scale(const S& c) {
    for (auto& x : a_) x = x * c;
    return *this;
  }

  friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
  friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    a.check(b);
    SquareMatrix r(a.n_);
    for (int i = 0; i < a.n_; ++i)
      for (int k = 0; k < a.n_; ++k) {
        const T& aik = a(i, k);
        for (int j = 0; j < a.n_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  /// Product with a column vector given as a random-access range.
  template <class V>
  std::vector<T> apply(const V& x) const {
    std::vector<T> r(static_cast<std::size_t>(n_), T(0.0));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r[static_cast<std::size_t>(i)] += (*this)(i, j) * x[static_cast<std::size_t>(j)];
    return r;
  }

 private:
  void check(const SquareMatrix& b) const {
    if (b.n_ != n_) throw InputError("matrix size mismatch");
  }

  int n_ = 0;
  std::vector<T> a_;
};

/// Trace of a*b without forming the product.
template <class T>
T trace_product(const SquareMatrix<T>& a, const SquareMatrix<T>& b) {
  T t(0.0);
  for (int i = 0; i < a.size(); ++i)
    for (int k = 0; k < a.size(); ++k) t += a(i, k) * b(k, i);
  return t;
}

template <class T>
SquareMatrix<double> values(const SquareMatrix<T>& a) {
  SquareMatrix<double> r(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) r(i, j) = value_of(a(i, j));
  return r;
}

inline double max_abs_difference(const SquareMatrix<double>& a, const SquareMatrix<double>& b) {
  if (a.size() != b.size()) throw InputError("matrix size mismatch");
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) {
      const double d = a(i, j) - b(i, j);
      m = d < 0 ? (-d > m ? -d : m) : (d > m ? d : m);
    }
  return m;
}

inline double max_abs(const SquareMatrix<double>& a) { return max_abs_difference(a, SquareMatrix<double>(a.size())); }

}  // namespace folint
