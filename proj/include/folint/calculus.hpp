#pragma once

// F-divergences of leaf operator fields, the operators R^P_{X,xi}, closed
// divergence forms, fiber integrands and the pointwise identities around them.

#include <vector>

#include "folint/invariants.hpp"
#include "folint/structure.hpp"

namespace folint {

/// Everything about one point that does not depend on xi.
struct PointContext {
  AdaptedFrameState frame;
  PCurvatureTable rp;
  SecondFundamentalData sf;

  int n() const { return frame.n; }
  int p() const { return frame.p; }
  int m() const { return frame.m; }
};

PointContext point_context(const SubRiemannianStructure& s, std::span<const double> point);

enum class NormalGauge {
  kParallel,  // NF-frame coefficients c_a with <nabla c_a e_a, e_b> = 0 at the point
  kConstant,  // coefficients held constant on the Gram-Schmidt frame
};

/// A unit normal xi = sum y_a e_a extended near the point, and the
/// quantities built from it, with derivatives along the frame.
struct NormalSample {
  std::vector<double> y;          // NF coefficients
  std::vector<double> xi;         // full-frame components
  std::vector<FrameJet> c;        // coefficient functions of the extension
  SquareMatrix<FrameJet> A;       // A_ij = <A e_j, e_i>
  std::vector<FrameJet> Z;        // leaf components of (nabla_xi xi)^T
  std::vector<FrameJet> tau;      // tau_0..tau_{n+2}
  std::vector<FrameJet> sigma;    // sigma_0..sigma_{n+2}, zero above n
  std::vector<SquareMatrix<FrameJet>> powers;  // A^0..A^{n+1}

  /// Derivative of a frame jet along xi.
  double along_xi(const FrameJet& f) const;
};

NormalSample normal_sample(const PointContext& ctx, std::span<const double> y, NormalGauge gauge = NormalGauge::kParallel);

/// Leaf components of Div_F S for an operator field S given in the leaf frame.
std::vector<double> divF_direct(const PointContext& ctx, const SquareMatrix<FrameJet>& S);

/// Div_F and full divergence of vector fields given by frame components.
double divF_vector(const PointContext& ctx, const std::vector<FrameJet>& Y);
double div_vector(const PointContext& ctx, const std::vector<FrameJet>& Y);

/// Matrix of R^P_{X,xi}: V -> (R^P(V,X) xi)^T; X in full-frame components.
SquareMatrix<double> curvature_operator(const PointContext& ctx, std::span<const double> X, std::span<const double> y);
/// Same with X given by its leaf components.
SquareMatrix<double> curvature_operator_leaf(const PointContext& ctx, std::span<const double> X, std::span<const double> y);

enum class ClosedFormSign {
  kDerived,   // from the Codazzi-type equation and self-adjointness of A
  kAsPrinted, // the printed form with R^P_{(-A)^{j-1}X, xi} added
};

/// Covector X -> <Div_F A^k, X> in leaf components.
std::vector<double> divF_Ak_closed(const PointContext& ctx, const NormalSample& s, int k,
                                   ClosedFormSign sign = ClosedFormSign::kDerived);
std::vector<double> divF_newton_closed(const PointContext& ctx, const NormalSample& s, int r);
std::vector<double> divF_general_closed(const PointContext& ctx, const NormalSample& s, const CoefficientRecipe& recipe,
                                        ClosedFormSign sign = ClosedFormSign::kDerived);

/// Operator fields along the sample.
SquareMatrix<FrameJet> newton_field(const NormalSample& s, int r);
SquareMatrix<FrameJet> general_field(const NormalSample& s, const CoefficientRecipe& recipe);
std::vector<FrameJet> recipe_coefficients(const NormalSample& s, const CoefficientRecipe& recipe);

/// Terms shared by all fiber integrands, for an operator S.
struct FiberTerms {
  double div_Z = 0.0;      // <Div_F S, Z>
  double trace_R = 0.0;    // tr(S R^P_{xi,xi})
  double frame_sum = 0.0;  // sum_a <S (nabla_{e_a} xi)^T, nabla_xi e_a>
  double mean_perp = 0.0;  // <S Z, H_perp>
};

FiberTerms fiber_terms(const PointContext& ctx, const NormalSample& s, const SquareMatrix<double>& S,
                       std::span<const double> divS);

/// Leafwise integrands (no H_perp term).
double fiber_integrand_general(const PointContext& ctx, const NormalSample& s, const CoefficientRecipe& recipe);
double fiber_integrand_newton(const PointContext& ctx, const NormalSample& s, int r);

/// Closed-manifold integrands (with the H_perp term and the xi-flux terms).
double closed_integrand_general(const PointContext& ctx, const NormalSample& s, const CoefficientRecipe& recipe);
double closed_integrand_newton(const PointContext& ctx, const NormalSample& s, int r);

/// Divergences of the fiber-summed vector fields behind the integral formulas,
/// for a constant-coefficient sample: Div_F(S Z), Div(S Z),
/// Div(g xi) with g = sum f_k tau_{k+1}/(k+1), <S Z, H_tilde> and g <xi, H_tilde>.
struct FieldDivergences {
  double divF_SZ = 0.0;
  double div_SZ = 0.0;
  double div_flux = 0.0;
  double SZ_H_tilde = 0.0;
  double flux_H_tilde = 0.0;
};
FieldDivergences field_divergences(const PointContext& ctx, const NormalSample& constant_sample,
                                   const CoefficientRecipe& recipe);

/// C(i,j) = -sum_mu <[e_i, xi], mu> <nabla_mu e_j, xi> over the D-tilde frame.
/// The Z-derivative lemma holds in the form lhs = rhs + C, and the fiber
/// integrands equal true divergences up to tr(S C).
SquareMatrix<double> frame_coupling(const PointContext& ctx, const NormalSample& s);
double frame_coupling_trace(const PointContext& ctx, const NormalSample& s, const SquareMatrix<double>& S);

/// Both sides of the Z-derivative lemma as n x n matrices (entry (i,j)).
struct Lemma31Sides {
  SquareMatrix<double> lhs, rhs, complement;  // complement: D-tilde bracket term
};
Lemma31Sides lemma31_sides(const PointContext& ctx, const NormalSample& s);
/// max |lhs - rhs - complement|.
double lemma31_check(const PointContext& ctx, const NormalSample& s);

/// Codazzi-type residual max over leaf pairs of |(nabla_X A)Y - (nabla_Y A)X + (R^P(X,Y)xi)^T|.
double codazzi_residual(const PointContext& ctx, const NormalSample& s);

/// (nabla^F_X S) in the leaf frame along the full-frame direction alpha.
SquareMatrix<double> covariant_derivative(const PointContext& ctx, const SquareMatrix<FrameJet>& S, int alpha);

}  // namespace folint
