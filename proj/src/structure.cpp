#include "folint/structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace folint {

namespace {

std::string format_point(std::span<const double> x) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", x[i]);
    if (i) s += ", ";
    s += buf;
  }
  return s + ")";
}

Jet3 inner_jet(const JetMatrix& g, int m, std::span<const Jet3> u, std::span<const Jet3> v) {
  Jet3 s(u[0].dim(), 0.0, std::min(u[0].order(), g[0].order()));
  for (int k = 0; k < m; ++k) {
    Jet3 t(u[0].dim(), 0.0, s.order());
    for (int l = 0; l < m; ++l) t += g[static_cast<std::size_t>(k * m + l)] * v[static_cast<std::size_t>(l)];
    s += u[static_cast<std::size_t>(k)] * t;
  }
  return s;
}

}  // namespace

SubRiemannianStructure::SubRiemannianStructure(std::string name, MetricField metric, int n, int p,
                                               std::vector<VectorExpr> d_span)
    : name_(std::move(name)), metric_(std::move(metric)), n_(n), p_(p), span_(std::move(d_span)) {
  const int m = metric_.dim();
  if (n < 1) throw InputError("leaf dimension n must be at least 1");
  if (p < 1) throw InputError("normal rank p must be at least 1");
  if (n + p > m) throw InputError("n + p exceeds the manifold dimension");
  if (span_.empty()) {
    for (int a = 0; a < n + p; ++a) {
      VectorExpr v;
      for (int k = 0; k < m; ++k) v.push_back(Expression::constant(k == a ? 1.0 : 0.0));
      span_.push_back(std::move(v));
    }
  }
  if (static_cast<int>(span_.size()) != n + p) throw InputError("d_span must list exactly n + p fields");
  for (const auto& v : span_) {
    if (static_cast<int>(v.size()) != m) throw InputError("each d_span field needs m components");
    for (const auto& e : v)
      if (e.max_coordinate() >= m) throw InputError("d_span component uses a coordinate beyond the chart dimension");
  }
}

std::vector<Jet3> SubRiemannianStructure::span_jet(int a, std::span<const double> point, int order) const {
  std::vector<Jet3> r;
  const auto x = point.first(static_cast<std::size_t>(dim()));
  for (const auto& e : span_[static_cast<std::size_t>(a)]) r.push_back(e.evaluate_jet(x, metric_.params(), order));
  return r;
}

std::vector<double> SubRiemannianStructure::span_value(int a, std::span<const double> point) const {
  std::vector<double> r;
  const auto x = point.first(static_cast<std::size_t>(dim()));
  for (const auto& e : span_[static_cast<std::size_t>(a)]) r.push_back(e.evaluate(x, metric_.params()));
  return r;
}

void SubRiemannianStructure::validate(int samples_per_axis) const {
  metric_.validate(samples_per_axis);
  const int m = dim();
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> x(static_cast<std::size_t>(m));
  const double h = kTwoPi / samples_per_axis;
  while (true) {
    for (int k = 0; k < m; ++k) x[static_cast<std::size_t>(k)] = h * idx[static_cast<std::size_t>(k)];
    const auto g = metric_.values(x);
    std::vector<std::vector<double>> vecs;
    for (int a = 0; a < n_ + p_; ++a) {
      auto v = span_value(a, x);
      for (double c : v)
        if (!std::isfinite(c)) throw GeometryError("d_span field " + std::to_string(a + 1) + " is not finite at " +
                                                   format_point(x));
      if (a < n_)
        for (int k = 0; k < m; ++k)
          if (v[static_cast<std::size_t>(k)] != (k == a ? 1.0 : 0.0))
            throw InputError("d_span field " + std::to_string(a + 1) + " must be the coordinate field d" +
                             std::to_string(a + 1));
      for (int k = 0; k < m; ++k) {
        auto shifted = x;
        shifted[static_cast<std::size_t>(k)] += kTwoPi;
        const auto w = span_value(a, shifted);
        for (int c = 0; c < m; ++c)
          if (!(std::abs(w[static_cast<std::size_t>(c)] - v[static_cast<std::size_t>(c)]) < 1e-12))
            throw GeometryError("d_span field " + std::to_string(a + 1) + " is not periodic along x" +
                                std::to_string(k + 1) + " at " + format_point(x));
      }
      vecs.push_back(std::move(v));
    }
    for (int k = n_ + p_; k < m; ++k) {
      std::vector<double> v(static_cast<std::size_t>(m), 0.0);
      v[static_cast<std::size_t>(k)] = 1.0;
      vecs.push_back(std::move(v));
    }
    // Gram determinants of the D span and of the completed frame.
    for (int r : {n_ + p_, m}) {
      std::vector<double> G(static_cast<std::size_t>(r * r));
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
          double s = 0.0;
          for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l)
              s += vecs[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k * m + l)] *
                   vecs[static_cast<std::size_t>(b)][static_cast<std::size_t>(l)];
          G[static_cast<std::size_t>(a * r + b)] = s;
        }
      if (!(determinant(G, r) > 1e-10))
        throw DegeneracyError(std::string(r == m ? "completed frame" : "d_span") +
                              " is degenerate (Gram determinant <= 1e-10) at " + format_point(x));
    }
    int k = 0;
    while (k < m && ++idx[static_cast<std::size_t>(k)] == samples_per_axis) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == m) break;
  }
}

std::vector<double> AdaptedFrameState::e_vector(int alpha) const {
  std::vector<double> r(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) r[static_cast<std::size_t>(k)] = e(alpha, k);
  return r;
}

double AdaptedFrameState::inner(std::span<const double> u, std::span<const double> v) const {
  double s = 0.0;
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) s += u[static_cast<std::size_t>(k)] * g(k, l) * v[static_cast<std::size_t>(l)];
  return s;
}

FrameJet AdaptedFrameState::to_frame(const Jet3& f) const {
  FrameJet r(f.value());
  if (f.order() < 1) return r;
  for (int a = 0; a < m; ++a) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += e(a, k) * f.grad(k);
    r.d[static_cast<std::size_t>(a)] = s;
  }
  return r;
}

std::vector<double> AdaptedFrameState::frame_components(std::span<const double> v) const {
  std::vector<double> c(static_cast<std::size_t>(m), 0.0);
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < m; ++k) c[static_cast<std::size_t>(a)] += coframe[static_cast<std::size_t>(a * m + k)] * v[static_cast<std::size_t>(k)];
  return c;
}

std::vector<double> AdaptedFrameState::from_frame(std::span<const double> c) const {
  std::vector<double> v(static_cast<std::size_t>(m), 0.0);
  for (std::size_t a = 0; a < c.size(); ++a)
    for (int k = 0; k < m; ++k) v[static_cast<std::size_t>(k)] += c[a] * e(static_cast<int>(a), k);
  return v;
}

double AdaptedFrameState::max_gram_error() const {
  double err = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const auto u = e_vector(a), v = e_vector(b);
      err = std::max(err, std::abs(inner(u, v) - (a == b ? 1.0 : 0.0)));
    }
  return err;
}

AdaptedFrameState adapted_frame(const SubRiemannianStructure& s, std::span<const double> point, int metric_order) {
  AdaptedFrameState f;
  f.m = s.dim();
  f.n = s.n();
  f.p = s.p();
  f.q = s.q();
  const int m = f.m;
  f.point.assign(point.begin(), point.begin() + m);
  f.metric = s.metric().metric_jet(f.point, metric_order);
  const JetMatrix ginv = inverse_spd(f.metric, m);
  f.gamma = christoffel_from_jets(f.metric, ginv, m);

  std::vector<double> gv(static_cast<std::size_t>(m * m));
  for (int k = 0; k < m * m; ++k) gv[static_cast<std::size_t>(k)] = f.metric[static_cast<std::size_t>(k)].value();
  f.sqrt_det = std::sqrt(determinant(gv, m));

  std::vector<std::vector<Jet3>> es;
  for (int a = 0; a < m; ++a) {
    std::vector<Jet3> v;
    if (a >= f.n && a < f.n + f.p) {
      v = s.span_jet(a, f.point, metric_order);
    } else {
      for (int k = 0; k < m; ++k) v.emplace_back(m, k == a ? 1.0 : 0.0, metric_order);
    }
    const Jet3 vv = inner_jet(f.metric, m, v, v);
    std::vector<Jet3> w = v;
    for (const auto& e : es) {
      const Jet3 c = inner_jet(f.metric, m, e, v);
      for (int k = 0; k < m; ++k) w[static_cast<std::size_t>(k)] -= c * e[static_cast<std::size_t>(k)];
    }
    const Jet3 ww = inner_jet(f.metric, m, w, w);
    if (!(ww.value() > 1e-10 * vv.value()))
      throw DegeneracyError("frame field " + std::to_string(a + 1) + " is degenerate at " + format_point(f.point));
    const Jet3 inv = 1.0 / sqrt(ww);
    for (auto& c : w) c = c * inv;
    es.push_back(std::move(w));
  }
  f.frame.reserve(static_cast<std::size_t>(m * m));
  for (const auto& e : es)
    for (const auto& c : e) f.frame.push_back(c);
  f.coframe.assign(static_cast<std::size_t>(m * m), 0.0);
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) f.coframe[static_cast<std::size_t>(a * m + k)] += gv[static_cast<std::size_t>(k * m + l)] * f.e(a, l);

  // nabla_{e_a} e_b in coordinates, then paired with e_c.
  const int order = metric_order - 1;
  const Jet3 zero(m, 0.0, order);
  std::vector<Jet3> et(static_cast<std::size_t>(m * m));
  for (int k = 0; k < m * m; ++k) et[static_cast<std::size_t>(k)] = f.frame[static_cast<std::size_t>(k)].truncated(order);
  // de[(b*m + k)*m + i] = d_i e_b^k + Gamma^k_ij e_b^j
  std::vector<Jet3> de(static_cast<std::size_t>(m * m * m), zero);
  for (int b = 0; b < m; ++b)
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i) {
        Jet3 u = f.e_jet(b, k).derivative(i);
        for (int j = 0; j < m; ++j) u += f.gamma.at(k, i, j) * et[static_cast<std::size_t>(b * m + j)];
        de[static_cast<std::size_t>((b * m + k) * m + i)] = u;
      }
  std::vector<Jet3> cov(static_cast<std::size_t>(m * m * m), zero);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < m; ++k) {
        Jet3 t = zero;
        for (int i = 0; i < m; ++i) t += et[static_cast<std::size_t>(a * m + i)] * de[static_cast<std::size_t>((b * m + k) * m + i)];
        cov[static_cast<std::size_t>((a * m + b) * m + k)] = t;
      }
  // Lower the index once: flat_c[k] = sum_l g_kl e_c^l.
  std::vector<Jet3> flat(static_cast<std::size_t>(m * m), zero);
  for (int c = 0; c < m; ++c)
    for (int k = 0; k < m; ++k) {
      Jet3 t = zero;
      for (int l = 0; l < m; ++l) t += f.metric[static_cast<std::size_t>(k * m + l)] * et[static_cast<std::size_t>(c * m + l)];
      flat[static_cast<std::size_t>(c * m + k)] = t;
    }
  f.omega_.resize(static_cast<std::size_t>(m * m * m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        Jet3 t = zero;
        for (int k = 0; k < m; ++k) t += cov[static_cast<std::size_t>((a * m + b) * m + k)] * flat[static_cast<std::size_t>(c * m + k)];
        f.omega_[static_cast<std::size_t>((a * m + b) * m + c)] = f.to_frame(t);
      }
  return f;
}

JetMatrix orthoprojector(const AdaptedFrameState& f) {
  const int m = f.m, r = f.rank_d();
  const int order = f.frame[0].order();
  JetMatrix P(static_cast<std::size_t>(m * m), Jet3(m, 0.0, order));
  for (int a = 0; a < r; ++a)
    for (int l = 0; l < m; ++l) {
      Jet3 th(m, 0.0, order);
      for (int j = 0; j < m; ++j) th += f.metric[static_cast<std::size_t>(l * m + j)] * f.e_jet(a, j);
      for (int k = 0; k < m; ++k) P[static_cast<std::size_t>(k * m + l)] += f.e_jet(a, k) * th;
    }
  return P;
}

double projector_idempotency_error(const AdaptedFrameState& f) {
  const int m = f.m;
  const JetMatrix P = orthoprojector(f);
  double err = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += P[static_cast<std::size_t>(i * m + k)].value() * P[static_cast<std::size_t>(k * m + j)].value();
      err = std::max(err, std::abs(s - P[static_cast<std::size_t>(i * m + j)].value()));
    }
  return err;
}

double projector_selfadjoint_error(const AdaptedFrameState& f) {
  // g P must be symmetric.
  const int m = f.m;
  const JetMatrix P = orthoprojector(f);
  double err = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double a = 0.0, b = 0.0;
      for (int k = 0; k < m; ++k) {
        a += f.g(i, k) * P[static_cast<std::size_t>(k * m + j)].value();
        b += f.g(j, k) * P[static_cast<std::size_t>(k * m + i)].value();
      }
      err = std::max(err, std::abs(a - b));
    }
  return err;
}

namespace {

std::vector<double> project_to_d(const AdaptedFrameState& f, std::span<const double> v) {
  const auto c = f.frame_components(v);
  std::vector<double> r(static_cast<std::size_t>(f.m), 0.0);
  for (int a = 0; a < f.rank_d(); ++a)
    for (int k = 0; k < f.m; ++k) r[static_cast<std::size_t>(k)] += c[static_cast<std::size_t>(a)] * f.e(a, k);
  return r;
}

}  // namespace

std::vector<double> induced_connection(const AdaptedFrameState& f, std::span<const double> X, std::span<const Jet3> U) {
  const auto v = covariant_derivative_field(f.gamma, U, X);
  return project_to_d(f, v);
}

PCurvatureTable::PCurvatureTable(const AdaptedFrameState& f, bool full_connection) {
  const int m = f.m;
  r_ = full_connection ? m : f.rank_d();
  m_ = m;
  t_.assign(static_cast<std::size_t>(m * m * r_ * r_), 0.0);
  for (int a = 0; a < m; ++a)
    for (int d = 0; d < m; ++d)
      for (int b = 0; b < r_; ++b)
        for (int c = 0; c < r_; ++c) {
          double v = f.omega(d, b, c).D(a) - f.omega(a, b, c).D(d);
          for (int h = 0; h < r_; ++h) v += f.omega(d, b, h).v * f.omega(a, h, c).v - f.omega(a, b, h).v * f.omega(d, h, c).v;
          for (int e = 0; e < m; ++e) v -= (f.omega(a, d, e).v - f.omega(d, a, e).v) * f.omega(e, b, c).v;
          t_[static_cast<std::size_t>(((a * m + d) * r_ + b) * r_ + c)] = v;
        }
}

std::vector<double> PCurvatureTable::apply(std::span<const double> X, std::span<const double> Y,
                                           std::span<const double> U) const {
  std::vector<double> r(static_cast<std::size_t>(r_), 0.0);
  for (int a = 0; a < static_cast<int>(X.size()); ++a) {
    if (X[static_cast<std::size_t>(a)] == 0.0) continue;
    for (int d = 0; d < static_cast<int>(Y.size()); ++d) {
      const double xy = X[static_cast<std::size_t>(a)] * Y[static_cast<std::size_t>(d)];
      if (xy == 0.0) continue;
      for (int b = 0; b < r_ && b < static_cast<int>(U.size()); ++b) {
        const double w = xy * U[static_cast<std::size_t>(b)];
        if (w == 0.0) continue;
        for (int c = 0; c < r_; ++c) r[static_cast<std::size_t>(c)] += w * (*this)(a, d, b, c);
      }
    }
  }
  return r;
}

std::vector<double> curvature_P(const AdaptedFrameState& f, std::span<const double> X, std::span<const double> Y,
                                std::span<const double> U) {
  const PCurvatureTable t(f);
  const auto x = f.frame_components(X), y = f.frame_components(Y), u = f.frame_components(U);
  const auto c = t.apply(x, y, std::span<const double>(u).first(static_cast<std::size_t>(f.rank_d())));
  return f.from_frame(c);
}

std::vector<double> curvature_P_direct(const SubRiemannianStructure& s, std::span<const double> point,
                                       std::span<const double> X, std::span<const double> Y,
                                       std::span<const double> U, int variant) {
  const AdaptedFrameState f = adapted_frame(s, point, 3);
  const int m = f.m, r = f.rank_d();
  const auto uc = f.frame_components(U);
  // Extension of U: coefficients u_a(x) on the D-frame.
  std::vector<Jet3> Uh(static_cast<std::size_t>(m), Jet3(m, 0.0, 2));
  for (int a = 0; a < r; ++a) {
    Jet3 coef(m, uc[static_cast<std::size_t>(a)], 2);
    if (variant != 0) {
      for (int k = 0; k < m; ++k) {
        const Jet3 dx = Jet3::variable(m, k, f.point) - f.point[static_cast<std::size_t>(k)];
        const double b = 0.3 * std::sin(1.0 + a + 2.0 * k + variant);
        const double c = 0.2 * std::cos(2.0 + 3.0 * a + k + variant);
        coef += b * dx + c * dx * dx;
      }
      coef = coef.truncated(2);
    }
    for (int k = 0; k < m; ++k) Uh[static_cast<std::size_t>(k)] += coef * f.e_jet(a, k).truncated(2);
  }
  JetMatrix P = orthoprojector(f);
  for (auto& e : P) e = e.truncated(2);
  auto nablaP = [&](std::span<const double> Z, const std::vector<Jet3>& V, int order) {
    std::vector<Jet3> out(static_cast<std::size_t>(m), Jet3(m, 0.0, order));
    std::vector<Jet3> cv(static_cast<std::size_t>(m), Jet3(m, 0.0, order));
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i) {
        const double zi = Z[static_cast<std::size_t>(i)];
        if (zi == 0.0) continue;
        cv[static_cast<std::size_t>(k)] += zi * V[static_cast<std::size_t>(k)].derivative(i).truncated(order);
        for (int j = 0; j < m; ++j)
          cv[static_cast<std::size_t>(k)] += zi * (f.gamma.at(k, i, j).truncated(order) * V[static_cast<std::size_t>(j)].truncated(order));
      }
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) out[static_cast<std::size_t>(k)] += P[static_cast<std::size_t>(k * m + l)].truncated(order) * cv[static_cast<std::size_t>(l)];
    return out;
  };
  const auto VY = nablaP(Y, Uh, 1);
  const auto VX = nablaP(X, Uh, 1);
  const auto WXY = nablaP(X, VY, 0);
  const auto WYX = nablaP(Y, VX, 0);
  std::vector<double> res(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) res[static_cast<std::size_t>(k)] = WXY[static_cast<std::size_t>(k)].value() - WYX[static_cast<std::size_t>(k)].value();
  return res;
}

SquareMatrix<double> shape_operator_coefficients(const AdaptedFrameState& f, std::span<const double> y) {
  SquareMatrix<double> A(f.n);
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j) {
      double s = 0.0;
      for (int a = 0; a < f.p; ++a) s -= y[static_cast<std::size_t>(a)] * f.omega(j, f.n + a, i).v;
      A(i, j) = s;
    }
  return A;
}

ShapeOperatorResult shape_operator(const AdaptedFrameState& f, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != f.m) throw InputError("xi must have m coordinate components");
  const auto c = f.frame_components(xi);
  double norm2 = 0.0;
  for (double v : c) norm2 += v * v;
  if (std::abs(norm2 - 1.0) > 1e-10) throw InputError("xi is not a unit vector");
  for (int a = 0; a < f.m; ++a)
    if ((a < f.n || a >= f.n + f.p) && std::abs(c[static_cast<std::size_t>(a)]) > 1e-10)
      throw InputError("xi is not a normal vector of the foliation inside D");
  const std::vector<double> y(c.begin() + f.n, c.begin() + f.n + f.p);
  ShapeOperatorResult r;
  const SquareMatrix<double> raw = shape_operator_coefficients(f, y);
  r.A = SquareMatrix<double>(f.n);
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j) {
      r.raw_asymmetry = std::max(r.raw_asymmetry, std::abs(raw(i, j) - raw(j, i)));
      r.A(i, j) = 0.5 * (raw(i, j) + raw(j, i));
      double hx = 0.0;
      for (int a = 0; a < f.p; ++a) hx += y[static_cast<std::size_t>(a)] * f.omega(i, j, f.n + a).v;
      r.h_pairing_residual = std::max(r.h_pairing_residual, std::abs(raw(j, i) - hx));
    }
  if (r.raw_asymmetry > 1e-6) throw ConsistencyError("shape operator is not self-adjoint (asymmetry above 1e-6)");
  return r;
}

SecondFundamentalData second_fundamental(const AdaptedFrameState& f, const std::vector<std::vector<double>>& xi_list) {
  SecondFundamentalData d;
  const int n = f.n, p = f.p, m = f.m;
  d.n = n;
  d.p = p;
  d.m = m;
  d.h.assign(static_cast<std::size_t>(n * n * m), 0.0);
  d.h_perp.assign(static_cast<std::size_t>(p * p * m), 0.0);
  d.T_perp.assign(static_cast<std::size_t>(p * p * m), 0.0);
  d.H.assign(static_cast<std::size_t>(m), 0.0);
  d.H_perp.assign(static_cast<std::size_t>(m), 0.0);
  d.H_tilde.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int c = n; c < m; ++c) d.h[static_cast<std::size_t>((i * n + j) * m + c)] = f.omega(i, j, c).v;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int c = 0; c < m; ++c) {
        if (c >= n && c < n + p) continue;
        const double x = f.omega(n + a, n + b, c).v, y = f.omega(n + b, n + a, c).v;
        d.h_perp[static_cast<std::size_t>((a * p + b) * m + c)] = 0.5 * (x + y);
        d.T_perp[static_cast<std::size_t>((a * p + b) * m + c)] = 0.5 * (x - y);
      }
  for (int c = 0; c < m; ++c) {
    for (int i = 0; i < n; ++i) d.H[static_cast<std::size_t>(c)] += d.h[static_cast<std::size_t>((i * n + i) * m + c)];
    for (int a = 0; a < p; ++a) d.H_perp[static_cast<std::size_t>(c)] += d.h_perp[static_cast<std::size_t>((a * p + a) * m + c)];
    if (c < n + p)
      for (int mu = n + p; mu < m; ++mu) d.H_tilde[static_cast<std::size_t>(c)] += f.omega(mu, mu, c).v;
  }
  for (const auto& y : xi_list) {
    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
          z[static_cast<std::size_t>(i)] += y[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(b)] * f.omega(n + a, n + b, i).v;
    d.Z.push_back(std::move(z));
  }
  return d;
}

double SecondFundamentalData::norm2_Ph() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int c = n; c < n + p; ++c) s += h[static_cast<std::size_t>((i * n + j) * m + c)] * h[static_cast<std::size_t>((i * n + j) * m + c)];
  return s;
}

double SecondFundamentalData::norm2_Ph_perp() const {
  double s = 0.0;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int c = 0; c < n; ++c) s += h_perp[static_cast<std::size_t>((a * p + b) * m + c)] * h_perp[static_cast<std::size_t>((a * p + b) * m + c)];
  return s;
}

double SecondFundamentalData::norm2_PT_perp() const {
  double s = 0.0;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int c = 0; c < n; ++c) s += T_perp[static_cast<std::size_t>((a * p + b) * m + c)] * T_perp[static_cast<std::size_t>((a * p + b) * m + c)];
  return s;
}

double SecondFundamentalData::norm2_PH() const {
  double s = 0.0;
  for (int c = n; c < n + p; ++c) s += H[static_cast<std::size_t>(c)] * H[static_cast<std::size_t>(c)];
  return s;
}

double SecondFundamentalData::norm2_PH_perp() const {
  double s = 0.0;
  for (int c = 0; c < n; ++c) s += H_perp[static_cast<std::size_t>(c)] * H_perp[static_cast<std::size_t>(c)];
  return s;
}

std::vector<double> bracket_T_perp(const AdaptedFrameState& f, int a, int b) {
  const int m = f.m, ia = f.n + a, ib = f.n + b;
  std::vector<double> br(static_cast<std::size_t>(m), 0.0);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      br[static_cast<std::size_t>(k)] += f.e(ia, i) * f.e_jet(ib, k).grad(i) - f.e(ib, i) * f.e_jet(ia, k).grad(i);
  auto c = f.frame_components(br);
  for (int g = 0; g < m; ++g) c[static_cast<std::size_t>(g)] = (g >= f.n && g < f.n + f.p) ? 0.0 : 0.5 * c[static_cast<std::size_t>(g)];
  return c;
}

CurvatureScalars curvature_scalars(const AdaptedFrameState& f, const PCurvatureTable& rp,
                                   std::span<const double> y, bool want_gaussian) {
  CurvatureScalars out;
  const int n = f.n, p = f.p;
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < n; ++i) out.S_mix += rp(i, n + a, n + a, i);
  if (!y.empty()) {
    double r = 0.0;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) r += y[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(b)] * rp(i, n + a, n + b, i);
    out.ric_P = r;
  }
  if (want_gaussian) {
    if (n != 1 || p != 1) throw InputError("Gaussian P-curvature needs n = 1 and p = 1");
    out.K_P = rp(0, 1, 1, 0);
  }
  return out;
}

}  // namespace folint
