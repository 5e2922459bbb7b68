#pragma once

// Power sums, elementary symmetric functions and operator polynomials of a
// self-adjoint leaf operator, generic over double and FrameJet entries.

#include <string>
#include <string_view>
#include <vector>

#include "folint/expr.hpp"
#include "folint/matrix.hpp"

namespace folint {

/// tau[k] = tr(A^k) for k = 0..kmax (tau[0] = n).
template <class T>
std::vector<T> power_sums(const SquareMatrix<T>& A, int kmax) {
  std::vector<T> tau;
  tau.push_back(T(static_cast<double>(A.size())));
  SquareMatrix<T> P = SquareMatrix<T>::identity(A.size());
  for (int k = 1; k <= kmax; ++k) {
    tau.push_back(trace_product(P, A));
    if (k < kmax) P = P * A;
  }
  return tau;
}

/// sigma[r] for r = 0..rmax from tau[1..rmax] by Newton's identities:
/// r sigma_r = sum_{i=1}^r (-1)^{i-1} sigma_{r-i} tau_i.
template <class T>
std::vector<T> elementary_from_power_sums(const std::vector<T>& tau, int rmax) {
  if (static_cast<int>(tau.size()) <= rmax) throw InputError("not enough power sums for the requested sigma");
  std::vector<T> sigma;
  sigma.push_back(T(1.0));
  for (int r = 1; r <= rmax; ++r) {
    T s(0.0);
    for (int i = 1; i <= r; ++i) {
      const T term = sigma[static_cast<std::size_t>(r - i)] * tau[static_cast<std::size_t>(i)];
      if (i % 2 == 1) s += term;
      else s -= term;
    }
    sigma.push_back(s * (1.0 / r));
  }
  return sigma;
}

/// Matrix powers A^0..A^kmax.
template <class T>
std::vector<SquareMatrix<T>> matrix_powers(const SquareMatrix<T>& A, int kmax) {
  std::vector<SquareMatrix<T>> p;
  p.push_back(SquareMatrix<T>::identity(A.size()));
  for (int k = 1; k <= kmax; ++k) p.push_back(p.back() * A);
  return p;
}

/// T_r by the recursion T_0 = id, T_r = sigma_r id - A T_{r-1}; sigma from power sums.
template <class T>
SquareMatrix<T> newton_recursive(const SquareMatrix<T>& A, const std::vector<T>& sigma, int r) {
  SquareMatrix<T> t = SquareMatrix<T>::identity(A.size());
  for (int s = 1; s <= r; ++s) {
    SquareMatrix<T> next = A * t;
    next.scale(T(-1.0));
    for (int i = 0; i < A.size(); ++i) next(i, i) += sigma[static_cast<std::size_t>(s)];
    t = std::move(next);
  }
  return t;
}

/// T_r = sum_{j<=r} (-1)^j sigma_{r-j} A^j.
template <class T>
SquareMatrix<T> newton_explicit(const std::vector<SquareMatrix<T>>& powers, const std::vector<T>& sigma, int r) {
  const int n = powers[0].size();
  SquareMatrix<T> t(n);
  for (int j = 0; j <= r; ++j) {
    SquareMatrix<T> term = powers[static_cast<std::size_t>(j)];
    term.scale(j % 2 == 0 ? sigma[static_cast<std::size_t>(r - j)] : -sigma[static_cast<std::size_t>(r - j)]);
    t += term;
  }
  return t;
}

double tau(const SquareMatrix<double>& A, int k);
double sigma(const SquareMatrix<double>& A, int r);
std::vector<double> sigmas(const SquareMatrix<double>& A);

/// Both definitions; ConsistencyError when they differ by more than 1e-8.
SquareMatrix<double> newton_transform(const SquareMatrix<double>& A, int r);

/// Coefficient functions f_0..f_{n-1} of the power sums tau_1..tau_n.
class CoefficientRecipe {
 public:
  /// "newton(r)" or n expressions in t1..tn separated by ';'.
  static CoefficientRecipe parse(std::string_view spec, int n);
  static CoefficientRecipe newton(int r, int n);
  static CoefficientRecipe from_expressions(std::vector<Expression> f);

  int arity() const { return n_; }
  bool is_newton() const { return newton_r_ >= 0; }
  int newton_r() const { return newton_r_; }
  const std::vector<Expression>& expressions() const { return f_; }
  std::string to_string() const;

  /// f values from tau (indices 0..n used, tau[0] ignored).
  std::vector<double> evaluate(const std::vector<double>& tau) const;
  /// f with frame derivatives by the chain rule through the tau arguments.
  std::vector<FrameJet> evaluate(const std::vector<FrameJet>& tau) const;

 private:
  int n_ = 0;
  int newton_r_ = -1;
  std::vector<Expression> f_;
};

/// sum_{k<n} f_k A^k.
template <class T>
SquareMatrix<T> operator_polynomial(const std::vector<SquareMatrix<T>>& powers, const std::vector<T>& f) {
  SquareMatrix<T> r(powers[0].size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    SquareMatrix<T> term = powers[k];
    term.scale(f[k]);
    r += term;
  }
  return r;
}

SquareMatrix<double> general_transform(const SquareMatrix<double>& A, const CoefficientRecipe& recipe);

}  // namespace folint
