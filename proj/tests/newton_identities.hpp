#pragma once

// Worst relative errors of the Newton-transformation identities over random
// symmetric matrices of size 2..6, in the order
//   tr T_r = (n - r) s_r
//   tr(A T_r) = (r + 1) s_{r+1}
//   tr(A^2 T_r) = s_1 s_{r+1} - (r + 2) s_{r+2}
//   tr(T_{r-1} A') = s_r'
//   k tr(A^{k-1} A') = tau_k'
// with derivatives along A + t A1 carried in frame jets.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "folint/invariants.hpp"

namespace folint::test {

inline SquareMatrix<double> random_symmetric(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SquareMatrix<double> a(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = u(rng);
  return a;
}

inline double relative_to(double a, double b, double scale) { return std::abs(a - b) / std::max(1.0, scale); }

inline std::array<double, 5> newton_identity_errors(unsigned long long seed, int trials) {
  std::mt19937_64 rng(seed);
  std::array<double, 5> worst{};
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 2 + trial % 5;
    const auto A = random_symmetric(rng, n);
    const auto A1 = random_symmetric(rng, n);
    const auto s = sigmas(A);
    const auto sig = [&](int r) { return r <= n ? s[static_cast<std::size_t>(r)] : 0.0; };
    const auto A2 = A * A;
    for (int r = 0; r <= n; ++r) {
      const auto T = newton_transform(A, r);
      const double scale =
          std::abs(sig(r)) + std::abs(sig(r + 1)) + std::abs(sig(r + 2)) + std::abs(sig(1) * sig(r + 1));
      worst[0] = std::max(worst[0], relative_to(T.trace(), (n - r) * sig(r), scale));
      worst[1] = std::max(worst[1], relative_to(trace_product(A, T), (r + 1) * sig(r + 1), scale));
      worst[2] = std::max(worst[2], relative_to(trace_product(A2, T), sig(1) * sig(r + 1) - (r + 2) * sig(r + 2), scale));
    }
    SquareMatrix<FrameJet> At(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        At(i, j) = A(i, j);
        At(i, j).d[0] = A1(i, j);
      }
    const auto tauj = power_sums(At, n + 2);
    const auto sigj = elementary_from_power_sums(tauj, n);
    for (int r = 1; r <= n; ++r) {
      const double lhs = trace_product(newton_transform(A, r - 1), A1);
      worst[3] = std::max(worst[3], relative_to(lhs, sigj[static_cast<std::size_t>(r)].d[0], std::abs(lhs)));
    }
    auto Ak = SquareMatrix<double>::identity(n);
    for (int k = 1; k <= n + 2; ++k) {
      const double lhs = k * trace_product(Ak, A1);
      worst[4] = std::max(worst[4], relative_to(lhs, tauj[static_cast<std::size_t>(k)].d[0], std::abs(lhs)));
      Ak = Ak * A;
    }
  }
  return worst;
}

}  // namespace folint::test
