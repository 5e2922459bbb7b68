#include "folint/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace folint {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

SquareMatrix<double> value_matrix(const SquareMatrix<FrameJet>& S) { return values(S); }

std::vector<double> mat_vec(const SquareMatrix<double>& S, std::span<const double> x) {
  std::vector<double> r(idx(S.size()), 0.0);
  for (int i = 0; i < S.size(); ++i)
    for (int j = 0; j < S.size(); ++j) r[idx(i)] += S(i, j) * x[idx(j)];
  return r;
}

double leaf_derivative(const FrameJet& f, std::span<const double> X) {
  double s = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) s += X[i] * f.D(static_cast<int>(i));
  return s;
}

}  // namespace

PointContext point_context(const SubRiemannianStructure& s, std::span<const double> point) {
  PointContext c;
  c.frame = adapted_frame(s, point, 2);
  c.rp = PCurvatureTable(c.frame);
  c.sf = second_fundamental(c.frame);
  return c;
}

double NormalSample::along_xi(const FrameJet& f) const {
  double s = 0.0;
  for (std::size_t a = 0; a < xi.size(); ++a) s += xi[a] * f.D(static_cast<int>(a));
  return s;
}

NormalSample normal_sample(const PointContext& ctx, std::span<const double> y, NormalGauge gauge) {
  const auto& f = ctx.frame;
  const int n = f.n, p = f.p, m = f.m;
  if (static_cast<int>(y.size()) != p) throw InputError("normal coefficients must have p entries");
  double norm2 = 0.0;
  for (double v : y) norm2 += v * v;
  if (std::abs(norm2 - 1.0) > 1e-10) throw InputError("normal direction is not a unit vector");
  NormalSample s;
  s.y.assign(y.begin(), y.end());
  s.xi.assign(idx(m), 0.0);
  for (int a = 0; a < p; ++a) s.xi[idx(n + a)] = y[idx(a)];
  for (int a = 0; a < p; ++a) {
    FrameJet c(y[idx(a)]);
    if (gauge == NormalGauge::kParallel)
      for (int al = 0; al < m; ++al) {
        double d = 0.0;
        for (int b = 0; b < p; ++b) d -= f.omega(al, n + b, n + a).v * y[idx(b)];
        c.d[idx(al)] = d;
      }
    s.c.push_back(c);
  }
  SquareMatrix<FrameJet> raw(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      FrameJet v(0.0);
      for (int a = 0; a < p; ++a) v -= s.c[idx(a)] * f.omega(j, n + a, i);
      raw(i, j) = v;
    }
  s.A = SquareMatrix<FrameJet>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.A(i, j) = 0.5 * (raw(i, j) + raw(j, i));
  for (int i = 0; i < n; ++i) {
    FrameJet z(0.0);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) z += s.c[idx(a)] * s.c[idx(b)] * f.omega(n + a, n + b, i);
    s.Z.push_back(z);
  }
  s.powers = matrix_powers(s.A, n + 1);
  s.tau.push_back(FrameJet(static_cast<double>(n)));
  for (int k = 1; k <= n + 2; ++k) s.tau.push_back(trace_product(s.powers[idx(k - 1)], s.A));
  s.sigma = elementary_from_power_sums(s.tau, n);
  while (static_cast<int>(s.sigma.size()) < n + 3) s.sigma.push_back(FrameJet(0.0));
  return s;
}

SquareMatrix<double> covariant_derivative(const PointContext& ctx, const SquareMatrix<FrameJet>& S, int alpha) {
  const auto& f = ctx.frame;
  const int n = S.size();
  SquareMatrix<double> M(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i) {
      double v = S(l, i).D(alpha);
      for (int k = 0; k < n; ++k) v += f.omega(alpha, k, l).v * S(k, i).v - S(l, k).v * f.omega(alpha, i, k).v;
      M(l, i) = v;
    }
  return M;
}

std::vector<double> divF_direct(const PointContext& ctx, const SquareMatrix<FrameJet>& S) {
  const int n = S.size();
  std::vector<double> d(idx(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto M = covariant_derivative(ctx, S, i);
    for (int l = 0; l < n; ++l) d[idx(l)] += M(l, i);
  }
  return d;
}

double divF_vector(const PointContext& ctx, const std::vector<FrameJet>& Y) {
  const auto& f = ctx.frame;
  double s = 0.0;
  for (int i = 0; i < f.n; ++i) {
    s += Y[idx(i)].D(i);
    for (int k = 0; k < f.n; ++k) s += Y[idx(k)].v * f.omega(i, k, i).v;
  }
  return s;
}

double div_vector(const PointContext& ctx, const std::vector<FrameJet>& Y) {
  const auto& f = ctx.frame;
  double s = 0.0;
  for (int a = 0; a < f.m; ++a) {
    s += Y[idx(a)].D(a);
    for (int b = 0; b < f.m; ++b) s += Y[idx(b)].v * f.omega(a, b, a).v;
  }
  return s;
}

SquareMatrix<double> curvature_operator(const PointContext& ctx, std::span<const double> X, std::span<const double> y) {
  const int n = ctx.n(), p = ctx.p(), m = ctx.m();
  SquareMatrix<double> R(n);
  for (int be = 0; be < m; ++be) {
    const double xb = X[idx(be)];
    if (xb == 0.0) continue;
    for (int b = 0; b < p; ++b) {
      const double w = xb * y[idx(b)];
      if (w == 0.0) continue;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(j, i) += w * ctx.rp(i, be, n + b, j);
    }
  }
  return R;
}

SquareMatrix<double> curvature_operator_leaf(const PointContext& ctx, std::span<const double> X, std::span<const double> y) {
  std::vector<double> full(idx(ctx.m()), 0.0);
  for (int i = 0; i < ctx.n(); ++i) full[idx(i)] = X[idx(i)];
  return curvature_operator(ctx, full, y);
}

std::vector<double> divF_Ak_closed(const PointContext& ctx, const NormalSample& s, int k, ClosedFormSign sign) {
  const int n = ctx.n();
  if (k < 1 || k > n + 1) throw InputError("power index k must be in 1..n+1");
  const auto A = value_matrix(s.A);
  std::vector<SquareMatrix<double>> P;
  for (const auto& q : s.powers) P.push_back(value_matrix(q));
  std::vector<double> out(idx(n), 0.0);
  for (int l = 0; l < n; ++l) {
    std::vector<double> X(idx(n), 0.0);
    X[idx(l)] = 1.0;
    std::vector<double> Y = X;   // A^{j-1} X
    std::vector<double> Yn = X;  // (-A)^{j-1} X
    double total = 0.0;
    for (int j = 1; j <= k; ++j) {
      total += leaf_derivative(s.tau[idx(k - j + 1)], Y) / (k - j + 1);
      if (sign == ClosedFormSign::kDerived) total -= trace_product(P[idx(k - j)], curvature_operator_leaf(ctx, Y, s.y));
      else total += trace_product(P[idx(k - j)], curvature_operator_leaf(ctx, Yn, s.y));
      Y = mat_vec(A, Y);
      Yn = mat_vec(A, Yn);
      for (auto& v : Yn) v = -v;
    }
    out[idx(l)] = total;
  }
  return out;
}

std::vector<double> divF_newton_closed(const PointContext& ctx, const NormalSample& s, int r) {
  const int n = ctx.n();
  if (r < 0 || r > n) throw InputError("Newton index r must be in 0..n");
  const auto A = value_matrix(s.A);
  std::vector<double> sig;
  for (const auto& x : s.sigma) sig.push_back(x.v);
  std::vector<SquareMatrix<double>> T;
  for (int q = 0; q <= r; ++q) T.push_back(newton_recursive(A, sig, q));
  std::vector<double> out(idx(n), 0.0);
  for (int l = 0; l < n; ++l) {
    std::vector<double> Y(idx(n), 0.0);
    Y[idx(l)] = 1.0;
    double total = 0.0;
    for (int j = 1; j <= r; ++j) {
      total += trace_product(T[idx(r - j)], curvature_operator_leaf(ctx, Y, s.y));
      Y = mat_vec(A, Y);
      for (auto& v : Y) v = -v;
    }
    out[idx(l)] = total;
  }
  return out;
}

std::vector<FrameJet> recipe_coefficients(const NormalSample& s, const CoefficientRecipe& recipe) {
  const int n = s.A.size();
  if (recipe.arity() != n) throw InputError("recipe arity must equal the leaf dimension n");
  return recipe.evaluate(std::vector<FrameJet>(s.tau.begin(), s.tau.begin() + n + 1));
}

std::vector<double> divF_general_closed(const PointContext& ctx, const NormalSample& s, const CoefficientRecipe& recipe,
                                        ClosedFormSign sign) {
  const int n = ctx.n();
  const auto fk = recipe_coefficients(s, recipe);
  std::vector<double> out(idx(n), 0.0);
  std::vector<std::vector<double>> Fk(idx(n));
  for (int k = 1; k < n; ++k) Fk[idx(k)] = divF_Ak_closed(ctx, s, k, sign);
  for (int k = 0; k < n; ++k) {
    const auto P = value_matrix(s.powers[idx(k)]);
    for (int l = 0; l < n; ++l) {
      std::vector<double> X(idx(n), 0.0);
      X[idx(l)] = 1.0;
      double v = leaf_derivative(fk[idx(k)], mat_vec(P, X));
      if (k > 0) v += fk[idx(k)].v * Fk[idx(k)][idx(l)];
      out[idx(l)] += v;
    }
  }
  return out;
}

SquareMatrix<FrameJet> newton_field(const NormalSample& s, int r) {
  if (r < 0 || r > s.A.size()) throw InputError("Newton index r must be in 0..n");
  return newton_recursive(s.A, s.sigma, r);
}

SquareMatrix<FrameJet> general_field(const NormalSample& s, const CoefficientRecipe& recipe) {
  const auto fk = recipe_coefficients(s, recipe);
  return operator_polynomial(std::vector<SquareMatrix<FrameJet>>(s.powers.begin(), s.powers.begin() + s.A.size()), fk);
}

FiberTerms fiber_terms(const PointContext& ctx, const NormalSample& s, const SquareMatrix<double>& S,
                       std::span<const double> divS) {
  const auto& f = ctx.frame;
  const int n = f.n, p = f.p;
  FiberTerms t;
  for (int l = 0; l < n; ++l) t.div_Z += divS[idx(l)] * s.Z[idx(l)].v;
  t.trace_R = trace_product(S, curvature_operator(ctx, s.xi, s.y));
  for (int a = 0; a < p; ++a) {
    std::vector<double> u(idx(n), 0.0), v(idx(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < p; ++b) {
        u[idx(i)] += s.y[idx(b)] * f.omega(n + a, n + b, i).v;
        v[idx(i)] += s.y[idx(b)] * f.omega(n + b, n + a, i).v;
      }
    const auto Su = mat_vec(S, u);
    for (int i = 0; i < n; ++i) t.frame_sum += Su[idx(i)] * v[idx(i)];
  }
  std::vector<double> z(idx(n));
  for (int i = 0; i < n; ++i) z[idx(i)] = s.Z[idx(i)].v;
  const auto Sz = mat_vec(S, z);
  for (int i = 0; i < n; ++i) t.mean_perp += Sz[idx(i)] * ctx.sf.H_perp[idx(i)];
  return t;
}

double fiber_integrand_general(const PointContext& ctx, const NormalSample& s, const CoefficientRecipe& recipe) {
  const int n = ctx.n();
  const auto fk = recipe_coefficients(s, recipe);
  const auto S = value_matrix(general_field(s, recipe));
  const auto t = fiber_terms(ctx, s, S, divF_general_closed(ctx, s, recipe));
  double v = t.div_Z + t.trace_R + t.frame_sum;
  for (int k = 0; k < n; ++k)
    v += fk[idx(k)].v * s.tau[idx(k + 2)].v - fk[idx(k)].v / (k + 1) * s.along_xi(s.tau[idx(k + 1)]);
  return v;
}

double fiber_integrand_newton(const PointContext& ctx, const NormalSample& s, int r) {
  const auto S = value_matrix(newton_field(s, r));
  const auto t = fiber_terms(ctx, s, S, divF_newton_closed(ctx, s, r));
  const auto& sg = s.sigma;
  return t.div_Z - s.along_xi(sg[idx(r + 1)]) - (r + 2) * sg[idx(r + 2)].v + sg[1].v * sg[idx(r + 1)].v + t.trace_R +
         t.frame_sum;
}

double closed_integrand_general(const PointContext& ctx, const NormalSample& s, const CoefficientRecipe& recipe) {
  const int n = ctx.n();
  const auto fk = recipe_coefficients(s, recipe);
  const auto S = value_matrix(general_field(s, recipe));
  const auto t = fiber_terms(ctx, s, S, divF_general_closed(ctx, s, recipe));
  double v = t.div_Z + t.trace_R - t.mean_perp + t.frame_sum;
  for (int k = 0; k < n; ++k)
    v += fk[idx(k)].v * s.tau[idx(k + 2)].v +
         s.tau[idx(k + 1)].v / (k + 1) * (s.along_xi(fk[idx(k)]) - fk[idx(k)].v * s.tau[1].v);
  return v;
}

double closed_integrand_newton(const PointContext& ctx, const NormalSample& s, int r) {
  const auto S = value_matrix(newton_field(s, r));
  const auto t = fiber_terms(ctx, s, S, divF_newton_closed(ctx, s, r));
  return t.div_Z - (r + 2) * s.sigma[idx(r + 2)].v - t.mean_perp + t.trace_R + t.frame_sum;
}

FieldDivergences field_divergences(const PointContext& ctx, const NormalSample& cs, const CoefficientRecipe& recipe) {
  const int n = ctx.n(), p = ctx.p(), m = ctx.m();
  const auto S = general_field(cs, recipe);
  const auto fk = recipe_coefficients(cs, recipe);
  std::vector<FrameJet> V(idx(m), FrameJet(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) V[idx(i)] += S(i, j) * cs.Z[idx(j)];
  FieldDivergences d;
  d.divF_SZ = divF_vector(ctx, V);
  d.div_SZ = div_vector(ctx, V);
  FrameJet g(0.0);
  for (int k = 0; k < n; ++k) g += fk[idx(k)] * cs.tau[idx(k + 1)] * (1.0 / (k + 1));
  std::vector<FrameJet> W(idx(m), FrameJet(0.0));
  for (int a = 0; a < p; ++a) W[idx(n + a)] = g * cs.c[idx(a)];
  d.div_flux = div_vector(ctx, W);
  for (int i = 0; i < n; ++i) d.SZ_H_tilde += V[idx(i)].v * ctx.sf.H_tilde[idx(i)];
  for (int a = 0; a < p; ++a) d.flux_H_tilde += g.v * cs.y[idx(a)] * ctx.sf.H_tilde[idx(n + a)];
  return d;
}

SquareMatrix<double> frame_coupling(const PointContext& ctx, const NormalSample& s) {
  const auto& f = ctx.frame;
  const int n = f.n, p = f.p, m = f.m;
  SquareMatrix<double> C(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double c = 0.0;
      for (int mu = n + p; mu < m; ++mu) {
        double br = 0.0, w = 0.0;
        for (int b = 0; b < p; ++b) {
          br += s.y[idx(b)] * (f.omega(i, n + b, mu).v - f.omega(n + b, i, mu).v);
          w += s.y[idx(b)] * f.omega(mu, j, n + b).v;
        }
        c -= br * w;
      }
      C(i, j) = c;
    }
  return C;
}

double frame_coupling_trace(const PointContext& ctx, const NormalSample& s, const SquareMatrix<double>& S) {
  const auto C = frame_coupling(ctx, s);
  double t = 0.0;
  for (int i = 0; i < C.size(); ++i)
    for (int j = 0; j < C.size(); ++j) t += C(i, j) * S(j, i);
  return t;
}

Lemma31Sides lemma31_sides(const PointContext& ctx, const NormalSample& s) {
  const auto& f = ctx.frame;
  const int n = f.n, p = f.p;
  Lemma31Sides L{SquareMatrix<double>(n), SquareMatrix<double>(n), SquareMatrix<double>(n)};
  const auto A = value_matrix(s.A);
  const auto A2 = A * A;
  SquareMatrix<double> dxiA(n);
  for (int a = 0; a < p; ++a) {
    auto M = covariant_derivative(ctx, s.A, n + a);
    M.scale(s.y[idx(a)]);
    dxiA += M;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double l = s.Z[idx(j)].D(i);
      for (int k = 0; k < n; ++k) l += s.Z[idx(k)].v * f.omega(i, k, j).v;
      L.lhs(i, j) = l;
      double r = A2(j, i) - dxiA(j, i);
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) r += s.y[idx(a)] * s.y[idx(b)] * ctx.rp(i, n + a, n + b, j);
      for (int a = 0; a < p; ++a) {
        double u = 0.0, v = 0.0;
        for (int b = 0; b < p; ++b) {
          u += s.y[idx(b)] * f.omega(n + b, n + a, i).v;
          v += s.y[idx(b)] * f.omega(n + a, n + b, j).v;
        }
        r += u * v;
      }
      L.rhs(i, j) = r;
    }
  L.complement = frame_coupling(ctx, s);
  return L;
}

double lemma31_check(const PointContext& ctx, const NormalSample& s) {
  const auto L = lemma31_sides(ctx, s);
  double r = 0.0;
  for (int i = 0; i < L.lhs.size(); ++i)
    for (int j = 0; j < L.lhs.size(); ++j) r = std::max(r, std::abs(L.lhs(i, j) - L.rhs(i, j) - L.complement(i, j)));
  return r;
}

double codazzi_residual(const PointContext& ctx, const NormalSample& s) {
  const int n = ctx.n(), p = ctx.p();
  std::vector<SquareMatrix<double>> M;
  for (int i = 0; i < n; ++i) M.push_back(covariant_derivative(ctx, s.A, i));
  double r = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int l = 0; l < n; ++l) {
        double v = M[idx(a)](l, b) - M[idx(b)](l, a);
        for (int c = 0; c < p; ++c) v += s.y[idx(c)] * ctx.rp(a, b, n + c, l);
        r = std::max(r, std::abs(v));
      }
  return r;
}

}  // namespace folint
