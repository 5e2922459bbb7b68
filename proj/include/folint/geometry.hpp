#pragma once

// Flat-torus charts, metric fields given by expressions, Levi-Civita
// connection and Riemann curvature.

#include <numbers>
#include <span>
#include <vector>

#include "folint/expr.hpp"
#include "folint/jet.hpp"

namespace folint {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class TorusChart {
 public:
  explicit TorusChart(int dim);

  int dim() const { return dim_; }
  double period() const { return kTwoPi; }

  /// Coordinates reduced into [0, 2*pi).
  std::vector<double> reduce(std::span<const double> point) const;

 private:
  int dim_;
};

/// Row-major m*m matrix of jets.
using JetMatrix = std::vector<Jet3>;

class MetricField {
 public:
  /// `upper` holds the m(m+1)/2 upper-triangle entries row by row.
  MetricField(int dim, std::vector<Expression> upper, ParameterTable params = {});

  static MetricField identity(int dim);

  int dim() const { return chart_.dim(); }
  const TorusChart& chart() const { return chart_; }
  const Expression& entry(int i, int j) const;
  const ParameterTable& params() const { return params_; }
  void set_params(ParameterTable params) { params_ = std::move(params); }

  /// Entry values at a point, row-major m*m.
  std::vector<double> values(std::span<const double> point) const;

  /// Metric jets; throws GeometryError if the value part is not positive definite.
  JetMatrix metric_jet(std::span<const double> point, int order = Jet3::kMaxOrder) const;

  /// Positive definiteness and periodicity on a uniform sample grid.
  /// Throws GeometryError naming the failed invariant and a witness point.
  void validate(int samples_per_axis = 16) const;

 private:
  TorusChart chart_;
  std::vector<Expression> upper_;
  ParameterTable params_;
};

/// Inverse of a symmetric positive definite jet matrix.
JetMatrix inverse_spd(const JetMatrix& g, int dim);

/// Determinant of a small (m <= 4) value matrix.
double determinant(std::span<const double> a, int dim);

/// Cholesky test; false when not positive definite.
bool is_positive_definite(std::span<const double> a, int dim);

struct ChristoffelField {
  int dim = 0;
  std::vector<Jet3> gamma;  // gamma[k*m*m + i*m + j] = Gamma^k_{ij}

  const Jet3& at(int k, int i, int j) const { return gamma[static_cast<std::size_t>((k * dim + i) * dim + j)]; }
  double value(int k, int i, int j) const { return at(k, i, j).value(); }
};

/// Christoffel symbols from metric jets of order q; the result carries order q-1.
ChristoffelField christoffel_from_jets(const JetMatrix& g, const JetMatrix& ginv, int dim);
ChristoffelField christoffel(const MetricField& g, std::span<const double> point, int metric_order = Jet3::kMaxOrder);

struct CurvatureSlot {
  int dim = 0;
  std::vector<double> point;
  std::vector<double> R;       // R[((l*m + k)*m + i)*m + j] = R^l_{kij}, R(d_i,d_j)d_k = R^l_{kij} d_l
  std::vector<double> metric;  // g at the point, row-major

  double up(int l, int k, int i, int j) const { return R[static_cast<std::size_t>(((l * dim + k) * dim + i) * dim + j)]; }
  /// <R(d_i,d_j)d_k, d_l>
  double lowered(int i, int j, int k, int l) const;
  /// Coordinate components of R(X,Y)U.
  std::vector<double> apply(std::span<const double> X, std::span<const double> Y, std::span<const double> U) const;

  double max_antisymmetry_first_pair() const;
  double max_antisymmetry_last_pair() const;
  double max_bianchi() const;
};

CurvatureSlot riemann(const MetricField& g, std::span<const double> point);

/// (nabla_X V)^k = X^i d_i V^k + X^i Gamma^k_{ij} V^j for a jet field V.
std::vector<double> covariant_derivative_field(const ChristoffelField& gamma, std::span<const Jet3> V,
                                               std::span<const double> X);
std::vector<double> covariant_derivative_field(const MetricField& g, std::span<const Jet3> V,
                                               std::span<const double> X, std::span<const double> point);

}  // namespace folint
