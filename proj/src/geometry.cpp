#include "folint/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <string>

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

int upper_index(int i, int j, int m) {
  if (i > j) std::swap(i, j);
  return i * m - i * (i - 1) / 2 + (j - i);
}

}  // namespace

TorusChart::TorusChart(int dim) : dim_(dim) {
  if (dim < 2 || dim > kMaxChartDim) throw InputError("torus chart dimension must be in 2..4");
}

std::vector<double> TorusChart::reduce(std::span<const double> point) const {
  std::vector<double> r(point.begin(), point.end());
  for (auto& x : r) {
    x = std::fmod(x, kTwoPi);
    if (x < 0) x += kTwoPi;
  }
  return r;
}

MetricField::MetricField(int dim, std::vector<Expression> upper, ParameterTable params)
    : chart_(dim), upper_(std::move(upper)), params_(std::move(params)) {
  if (static_cast<int>(upper_.size()) != dim * (dim + 1) / 2)
    throw InputError("metric needs " + std::to_string(dim * (dim + 1) / 2) + " upper-triangle entries");
  for (const auto& e : upper_) {
    if (e.empty()) throw InputError("metric entry is empty");
    if (e.max_coordinate() >= dim) throw InputError("metric entry uses a coordinate beyond the chart dimension");
  }
}

MetricField MetricField::identity(int dim) {
  std::vector<Expression> upper;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) upper.push_back(Expression::constant(i == j ? 1.0 : 0.0));
  return MetricField(dim, std::move(upper));
}

const Expression& MetricField::entry(int i, int j) const {
  return upper_[static_cast<std::size_t>(upper_index(i, j, dim()))];
}

std::vector<double> MetricField::values(std::span<const double> point) const {
  const int m = dim();
  std::vector<double> g(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double v = entry(i, j).evaluate(point.first(static_cast<std::size_t>(m)), params_);
      g[static_cast<std::size_t>(i * m + j)] = v;
      g[static_cast<std::size_t>(j * m + i)] = v;
    }
  return g;
}

JetMatrix MetricField::metric_jet(std::span<const double> point, int order) const {
  const int m = dim();
  if (static_cast<int>(point.size()) < m) throw InputError("point has fewer coordinates than the chart");
  const auto x = point.first(static_cast<std::size_t>(m));
  JetMatrix g(static_cast<std::size_t>(m * m));
  std::vector<double> vals(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      Jet3 e = entry(i, j).evaluate_jet(x, params_, order);
      g[static_cast<std::size_t>(i * m + j)] = e;
      g[static_cast<std::size_t>(j * m + i)] = e;
      vals[static_cast<std::size_t>(i * m + j)] = vals[static_cast<std::size_t>(j * m + i)] = e.value();
    }
  if (!is_positive_definite(vals, m)) throw GeometryError("metric is not positive definite at " + format_point(x));
  return g;
}

void MetricField::validate(int samples_per_axis) const {
  const int m = dim();
  if (samples_per_axis < 1) throw InputError("validation needs at least one sample per axis");
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> x(static_cast<std::size_t>(m)), shifted(static_cast<std::size_t>(m));
  const double h = kTwoPi / samples_per_axis;
  while (true) {
    for (int k = 0; k < m; ++k) x[static_cast<std::size_t>(k)] = h * idx[static_cast<std::size_t>(k)];
    const auto g0 = values(x);
    for (double v : g0)
      if (!std::isfinite(v)) throw GeometryError("metric entry is not finite at " + format_point(x));
    if (!is_positive_definite(g0, m)) throw GeometryError("metric is not positive definite at " + format_point(x));
    for (int k = 0; k < m; ++k) {
      shifted = x;
      shifted[static_cast<std::size_t>(k)] += kTwoPi;
      const auto g1 = values(shifted);
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
          if (!(std::abs(g1[static_cast<std::size_t>(i * m + j)] - g0[static_cast<std::size_t>(i * m + j)]) < 1e-12))
            throw GeometryError("metric entry g" + std::to_string(i + 1) + std::to_string(j + 1) +
                                " is not periodic along x" + std::to_string(k + 1) + " at " + format_point(x));
    }
    int k = 0;
    while (k < m && ++idx[static_cast<std::size_t>(k)] == samples_per_axis) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == m) break;
  }
}

bool is_positive_definite(std::span<const double> a, int dim) {
  double L[kMaxChartDim][kMaxChartDim] = {};
  for (int j = 0; j < dim; ++j) {
    double s = a[static_cast<std::size_t>(j * dim + j)];
    for (int k = 0; k < j; ++k) s -= L[j][k] * L[j][k];
    if (!(s > 0.0)) return false;
    L[j][j] = std::sqrt(s);
    for (int i = j + 1; i < dim; ++i) {
      double t = a[static_cast<std::size_t>(i * dim + j)];
      for (int k = 0; k < j; ++k) t -= L[i][k] * L[j][k];
      L[i][j] = t / L[j][j];
    }
  }
  return true;
}

double determinant(std::span<const double> a, int dim) {
  double M[kMaxChartDim][kMaxChartDim];
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) M[i][j] = a[static_cast<std::size_t>(i * dim + j)];
  double det = 1.0;
  for (int c = 0; c < dim; ++c) {
    int piv = c;
    for (int r = c + 1; r < dim; ++r)
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    if (M[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < dim; ++j) std::swap(M[c][j], M[piv][j]);
      det = -det;
    }
    det *= M[c][c];
    for (int r = c + 1; r < dim; ++r) {
      const double f = M[r][c] / M[c][c];
      for (int j = c; j < dim; ++j) M[r][j] -= f * M[c][j];
    }
  }
  return det;
}

JetMatrix inverse_spd(const JetMatrix& g, int dim) {
  // Gauss-Jordan without pivoting; safe for positive definite input.
  JetMatrix a = g;
  const int order = g.front().order();
  JetMatrix inv(static_cast<std::size_t>(dim * dim), Jet3(g.front().dim(), 0.0, order));
  for (int i = 0; i < dim; ++i) inv[static_cast<std::size_t>(i * dim + i)] = Jet3(g.front().dim(), 1.0, order);
  auto at = [dim](JetMatrix& M, int i, int j) -> Jet3& { return M[static_cast<std::size_t>(i * dim + j)]; };
  for (int c = 0; c < dim; ++c) {
    const Jet3 pivot = at(a, c, c);
    if (pivot.value() <= 0.0) throw GeometryError("metric is not positive definite");
    const Jet3 rp = 1.0 / pivot;
    for (int j = 0; j < dim; ++j) {
      at(a, c, j) = at(a, c, j) * rp;
      at(inv, c, j) = at(inv, c, j) * rp;
    }
    for (int r = 0; r < dim; ++r) {
      if (r == c) continue;
      const Jet3 f = at(a, r, c);
      for (int j = 0; j < dim; ++j) {
        at(a, r, j) -= f * at(a, c, j);
        at(inv, r, j) -= f * at(inv, c, j);
      }
    }
  }
  return inv;
}

ChristoffelField christoffel_from_jets(const JetMatrix& g, const JetMatrix& ginv, int m) {
  ChristoffelField out;
  out.dim = m;
  const int order = g.front().order() - 1;
  if (order < 0) throw InputError("christoffel symbols need metric jets of order at least 1");
  // dg[l][i][j] = d_l g_ij
  std::vector<Jet3> dg(static_cast<std::size_t>(m * m * m));
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        dg[static_cast<std::size_t>((l * m + i) * m + j)] = g[static_cast<std::size_t>(i * m + j)].derivative(l);
  auto d = [&](int l, int i, int j) -> const Jet3& { return dg[static_cast<std::size_t>((l * m + i) * m + j)]; };
  std::vector<Jet3> lower(static_cast<std::size_t>(m * m * m));  // [l][i][j] = Gamma_{l,ij}
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        Jet3 v = 0.5 * (d(i, j, l) + d(j, i, l) - d(l, i, j));
        lower[static_cast<std::size_t>((l * m + i) * m + j)] = v;
        lower[static_cast<std::size_t>((l * m + j) * m + i)] = v;
      }
  out.gamma.assign(static_cast<std::size_t>(m * m * m), Jet3(g.front().dim(), 0.0, order));
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        Jet3 s(g.front().dim(), 0.0, order);
        for (int l = 0; l < m; ++l)
          s += ginv[static_cast<std::size_t>(k * m + l)].truncated(order) * lower[static_cast<std::size_t>((l * m + i) * m + j)];
        out.gamma[static_cast<std::size_t>((k * m + i) * m + j)] = s;
        out.gamma[static_cast<std::size_t>((k * m + j) * m + i)] = s;
      }
  return out;
}

ChristoffelField christoffel(const MetricField& g, std::span<const double> point, int metric_order) {
  const JetMatrix gj = g.metric_jet(point, metric_order);
  return christoffel_from_jets(gj, inverse_spd(gj, g.dim()), g.dim());
}

double CurvatureSlot::lowered(int i, int j, int k, int l) const {
  double s = 0.0;
  for (int mu = 0; mu < dim; ++mu) s += metric[static_cast<std::size_t>(l * dim + mu)] * up(mu, k, i, j);
  return s;
}

std::vector<double> CurvatureSlot::apply(std::span<const double> X, std::span<const double> Y,
                                         std::span<const double> U) const {
  std::vector<double> r(static_cast<std::size_t>(dim), 0.0);
  for (int l = 0; l < dim; ++l)
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          r[static_cast<std::size_t>(l)] += up(l, k, i, j) * U[static_cast<std::size_t>(k)] *
                                            X[static_cast<std::size_t>(i)] * Y[static_cast<std::size_t>(j)];
  return r;
}

double CurvatureSlot::max_antisymmetry_first_pair() const {
  double m = 0.0;
  for (int l = 0; l < dim; ++l)
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m = std::max(m, std::abs(up(l, k, i, j) + up(l, k, j, i)));
  return m;
}

double CurvatureSlot::max_antisymmetry_last_pair() const {
  double m = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) m = std::max(m, std::abs(lowered(i, j, k, l) + lowered(i, j, l, k)));
  return m;
}

double CurvatureSlot::max_bianchi() const {
  double m = 0.0;
  for (int l = 0; l < dim; ++l)
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m = std::max(m, std::abs(up(l, k, i, j) + up(l, i, j, k) + up(l, j, k, i)));
  return m;
}

CurvatureSlot riemann(const MetricField& g, std::span<const double> point) {
  const int m = g.dim();
  const ChristoffelField G = christoffel(g, point, 2);
  CurvatureSlot s;
  s.dim = m;
  s.point.assign(point.begin(), point.begin() + m);
  s.metric = g.values(point);
  s.R.assign(static_cast<std::size_t>(m * m * m * m), 0.0);
  for (int l = 0; l < m; ++l)
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double v = G.at(l, j, k).grad(i) - G.at(l, i, k).grad(j);
          for (int mu = 0; mu < m; ++mu) v += G.value(l, i, mu) * G.value(mu, j, k) - G.value(l, j, mu) * G.value(mu, i, k);
          s.R[static_cast<std::size_t>(((l * m + k) * m + i) * m + j)] = v;
        }
  return s;
}

std::vector<double> covariant_derivative_field(const ChristoffelField& gamma, std::span<const Jet3> V,
                                               std::span<const double> X) {
  const int m = gamma.dim;
  std::vector<double> r(static_cast<std::size_t>(m), 0.0);
  for (int k = 0; k < m; ++k) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double xi = X[static_cast<std::size_t>(i)];
      if (xi == 0.0) continue;
      s += xi * V[static_cast<std::size_t>(k)].grad(i);
      for (int j = 0; j < m; ++j) s += xi * gamma.value(k, i, j) * V[static_cast<std::size_t>(j)].value();
    }
    r[static_cast<std::size_t>(k)] = s;
  }
  return r;
}

std::vector<double> covariant_derivative_field(const MetricField& g, std::span<const Jet3> V,
                                               std::span<const double> X, std::span<const double> point) {
  return covariant_derivative_field(christoffel(g, point, 1), V, X);
}

}  // namespace folint
