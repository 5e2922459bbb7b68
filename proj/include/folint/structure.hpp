#pragma once

// Foliated sub-Riemannian structure: D = TF + NF spanned by expression
// fields, adapted frames over jets, the orthoprojector onto D, the induced
// connection and its curvature, shape operators and second fundamental forms.

#include <optional>
#include <string>
#include <vector>

#include "folint/frame_jet.hpp"
#include "folint/geometry.hpp"
#include "folint/matrix.hpp"

namespace folint {

using VectorExpr = std::vector<Expression>;

class SubRiemannianStructure {
 public:
  /// `d_span` lists n+p fields of m components; empty means d_1..d_{n+p}.
  SubRiemannianStructure(std::string name, MetricField metric, int n, int p, std::vector<VectorExpr> d_span = {});

  const std::string& name() const { return name_; }
  const MetricField& metric() const { return metric_; }
  MetricField& metric() { return metric_; }
  int dim() const { return metric_.dim(); }
  int n() const { return n_; }
  int p() const { return p_; }
  int q() const { return dim() - n_ - p_; }
  bool is_full_tangent() const { return q() == 0; }
  const std::vector<VectorExpr>& d_span() const { return span_; }

  /// Coordinate components of span field `a` as jets.
  std::vector<Jet3> span_jet(int a, std::span<const double> point, int order) const;
  std::vector<double> span_value(int a, std::span<const double> point) const;

  /// Metric validation plus span independence (Gram determinant > 1e-10)
  /// and the coordinate-leaf requirement, at samples_per_axis^m points.
  void validate(int samples_per_axis = 16) const;

 private:
  std::string name_;
  MetricField metric_;
  int n_, p_;
  std::vector<VectorExpr> span_;
};

/// Adapted orthonormal frame at a point. Frame index alpha runs over leaf
/// fields [0,n), normal fields [n,n+p) and the complement of D [n+p,m).
class AdaptedFrameState {
 public:
  int m = 0, n = 0, p = 0, q = 0;
  std::vector<double> point;
  JetMatrix metric;
  ChristoffelField gamma;
  std::vector<Jet3> frame;      // frame[alpha*m + k]
  std::vector<double> coframe;  // coframe[alpha*m + k] = <e_alpha, d_k>
  double sqrt_det = 1.0;

  int rank_d() const { return n + p; }
  double e(int alpha, int k) const { return frame[static_cast<std::size_t>(alpha * m + k)].value(); }
  const Jet3& e_jet(int alpha, int k) const { return frame[static_cast<std::size_t>(alpha * m + k)]; }
  std::vector<double> e_vector(int alpha) const;
  double g(int i, int j) const { return metric[static_cast<std::size_t>(i * m + j)].value(); }
  double inner(std::span<const double> u, std::span<const double> v) const;

  /// omega(alpha,beta,gamma) = <nabla_{e_alpha} e_beta, e_gamma> with frame derivatives.
  const FrameJet& omega(int a, int b, int c) const { return omega_[static_cast<std::size_t>((a * m + b) * m + c)]; }

  /// Derivatives of a coordinate jet along the frame fields.
  FrameJet to_frame(const Jet3& f) const;

  /// Frame components <v, e_alpha> of a coordinate vector.
  std::vector<double> frame_components(std::span<const double> v) const;
  /// Coordinate vector sum_alpha c_alpha e_alpha.
  std::vector<double> from_frame(std::span<const double> c) const;

  double max_gram_error() const;

  std::vector<FrameJet> omega_;
};

/// Gram-Schmidt over jets in fixed order; metric jets of `metric_order`
/// (frame derivatives of omega need at least 2). Throws DegeneracyError.
AdaptedFrameState adapted_frame(const SubRiemannianStructure& s, std::span<const double> point, int metric_order = 2);

/// P = sum over D-frame of e_alpha (x) e_alpha^flat as a jet matrix P[k*m+l] (P^k_l).
JetMatrix orthoprojector(const AdaptedFrameState& f);
double projector_idempotency_error(const AdaptedFrameState& f);
double projector_selfadjoint_error(const AdaptedFrameState& f);

/// P(nabla_X U) for a jet field U tangent to D.
std::vector<double> induced_connection(const AdaptedFrameState& f, std::span<const double> X, std::span<const Jet3> U);

/// <R^P(e_a, e_d) e_b, e_c>: a, d over the full frame, b, c over the D-frame.
/// With full_connection the Levi-Civita curvature of the whole frame.
class PCurvatureTable {
 public:
  PCurvatureTable() = default;
  PCurvatureTable(const AdaptedFrameState& f, bool full_connection = false);

  int rank() const { return r_; }
  double operator()(int a, int d, int b, int c) const {
    return t_[static_cast<std::size_t>(((a * m_ + d) * r_ + b) * r_ + c)];
  }
  /// Frame components of R^P(X,Y)U; X, Y full-frame, U D-frame coefficients.
  std::vector<double> apply(std::span<const double> X, std::span<const double> Y, std::span<const double> U) const;

 private:
  int m_ = 0, r_ = 0;
  std::vector<double> t_;
};

/// R^P(X,Y)U by the frame formula; coordinates in, coordinates out.
std::vector<double> curvature_P(const AdaptedFrameState& f, std::span<const double> X, std::span<const double> Y,
                                std::span<const double> U);

/// R^P(X,Y)U by differentiating P nabla (P nabla U) for a jet extension of U
/// with constant coordinate fields X, Y. `variant` 0 keeps the frame
/// coefficients of U constant; other values add a quadratic perturbation
/// vanishing at the point.
std::vector<double> curvature_P_direct(const SubRiemannianStructure& s, std::span<const double> point,
                                       std::span<const double> X, std::span<const double> Y,
                                       std::span<const double> U, int variant = 0);

struct ShapeOperatorResult {
  SquareMatrix<double> A;       // symmetrized, leaf frame basis
  double raw_asymmetry = 0.0;   // max |A_ij - A_ji| before symmetrization
  double h_pairing_residual = 0.0;  // max |<A e_i, e_j> - <h(e_i,e_j), xi>|
};

/// Shape operator of a unit normal xi (coordinates); input and consistency errors.
ShapeOperatorResult shape_operator(const AdaptedFrameState& f, std::span<const double> xi);

/// Shape operator for NF-frame coefficients y (|y| = 1 not required).
SquareMatrix<double> shape_operator_coefficients(const AdaptedFrameState& f, std::span<const double> y);

struct SecondFundamentalData {
  int n = 0, p = 0, m = 0;
  std::vector<double> h;       // h[(i*n + j)*m + gamma], frame components gamma >= n
  std::vector<double> h_perp;  // h_perp[(a*p + b)*m + gamma], gamma outside NF
  std::vector<double> T_perp;  // same layout, antisymmetric part
  std::vector<double> H, H_perp, H_tilde;  // frame components
  std::vector<std::vector<double>> Z;      // leaf components of Z(xi) per requested xi

  double norm2_Ph() const;
  double norm2_Ph_perp() const;
  double norm2_PT_perp() const;
  double norm2_PH() const;
  double norm2_PH_perp() const;
};

/// `xi_list` holds NF-frame coefficient vectors.
SecondFundamentalData second_fundamental(const AdaptedFrameState& f, const std::vector<std::vector<double>>& xi_list = {});

/// 1/2 [e_a, e_b] projected off NF, computed from the coordinate Lie bracket.
std::vector<double> bracket_T_perp(const AdaptedFrameState& f, int a, int b);

struct CurvatureScalars {
  double S_mix = 0.0;
  std::optional<double> ric_P;  // for the requested xi
  std::optional<double> K_P;    // n = 1 and p = 1 only
};

CurvatureScalars curvature_scalars(const AdaptedFrameState& f, const PCurvatureTable& rp,
                                   std::span<const double> xi_coefficients = {}, bool want_gaussian = false);

}  // namespace folint
