#pragma once

// Integral-formula checkers. Each evaluates one identity as a residual over
// the torus, a leaf or the unit normal bundle, probes the hypotheses it
// needs, and returns a FormulaReport.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "folint/calculus.hpp"
#include "folint/quadrature.hpp"

namespace folint {

struct HypothesisResult {
  std::string name;
  double violation = 0.0;
  double threshold = 0.0;
  bool passed = true;
  std::optional<double> fitted;  // constant of the best fit, for fitted kinds
};

enum class HypothesisKind {
  kHarmonicDtilde,       // |H_tilde|
  kAutoparallelNF,       // |(nabla_X Y)^T|, X, Y in NF
  kHarmonicF,            // |sigma_1(xi)|
  kUmbilicalF,           // |A_xi - sigma_1/n id|
  kCurvatureInvariant,   // NF part of R^P(X,Y)V, X, Y, V in TF
  kConstantCurvature,    // R^P(X,Y)Z = c(<Y,Z>X - <X,Z>Y) on D
  kEinstein,             // tr R^P_{X,xi} = C <X, xi>
  kFrameCoupling,        // <[e_i, xi], mu> <nabla_mu e_j, xi> over D-tilde
};

const char* hypothesis_name(HypothesisKind kind);

struct ProbeOptions {
  int resolution = 6;      // probe points per axis
  int sphere = 8;          // fiber nodes for xi-dependent probes
  double threshold = 1e-9;
};

/// All probes in one pass over the probe grid, in HypothesisKind order.
std::vector<HypothesisResult> probe_hypotheses(const SubRiemannianStructure& s, const ProbeOptions& opt = {});
HypothesisResult check_hypothesis(const SubRiemannianStructure& s, HypothesisKind kind, const ProbeOptions& opt = {});

struct FormulaReport {
  std::string formula_id;
  std::string status = "evaluated";  // evaluated | hypotheses-not-met | inapplicable
  std::string message;
  std::vector<HypothesisResult> hypotheses;
  double residual = 0.0;
  double normalizer = 0.0;
  double relative_residual = 0.0;
  std::vector<int> grid;
  int sphere = 0;
  std::vector<double> leaf;
  std::vector<std::pair<std::string, double>> values;  // diagnostics in insertion order
  double wall_time = 0.0;

  bool hypotheses_met() const;
  /// Evaluated, hypotheses met and relative residual below `tol`.
  bool passed(double tol) const;
  /// Named diagnostic; InputError when absent.
  double value(const std::string& name) const;
};

inline constexpr double kRelativeFloor = 1e-14;

struct CheckOptions {
  std::vector<int> grid = {16};  // one count per axis, or one for all axes
  int sphere = 32;
  std::vector<double> leaf;      // basepoint (m coordinates or the m - n transversal ones)
  ProbeOptions probe;
};

/// Shared probe results for a batch of checks on one structure.
class ProbeCache {
 public:
  ProbeCache(const SubRiemannianStructure& s, const ProbeOptions& opt) : s_(s), opt_(opt) {}
  const std::vector<HypothesisResult>& get();
  HypothesisResult get(HypothesisKind kind);

 private:
  const SubRiemannianStructure& s_;
  ProbeOptions opt_;
  std::optional<std::vector<HypothesisResult>> cache_;
};

FormulaReport check_pw(const SubRiemannianStructure& s, const CheckOptions& opt, ProbeCache* probes = nullptr);
FormulaReport check_closed_newton(const SubRiemannianStructure& s, int r, const CheckOptions& opt,
                                  ProbeCache* probes = nullptr);
FormulaReport check_closed_general(const SubRiemannianStructure& s, const CoefficientRecipe& recipe,
                                   const CheckOptions& opt, ProbeCache* probes = nullptr);
FormulaReport check_leafwise(const SubRiemannianStructure& s, const CoefficientRecipe& recipe, const CheckOptions& opt,
                             ProbeCache* probes = nullptr);
/// Leafwise check over a transversal grid of basepoints (count per transversal axis).
FormulaReport check_leaf_sweep(const SubRiemannianStructure& s, const CoefficientRecipe& recipe, int transversal,
                               const CheckOptions& opt, ProbeCache* probes = nullptr);
/// sum over N_1F of (r+2) sigma_{r+2} - tr(T_r R_{xi,xi}); the tau series with k = r is a diagnostic.
FormulaReport check_autoparallel_series(const SubRiemannianStructure& s, int r, const CheckOptions& opt,
                                        ProbeCache* probes = nullptr);
/// tau_{k+2} - tau_{k+1} tau_1/(k+1) + tr(A^k R_{xi,xi}).
FormulaReport check_autoparallel_tau(const SubRiemannianStructure& s, int k, const CheckOptions& opt,
                                     ProbeCache* probes = nullptr);

enum class MeanKind { kSigma, kTau };
double total_mean_curvature(const SubRiemannianStructure& s, int k, MeanKind kind, const GridScheme& grid,
                            const SphereScheme& sphere);
FormulaReport check_total_mean(const SubRiemannianStructure& s, int k, const CheckOptions& opt,
                               ProbeCache* probes = nullptr);
FormulaReport check_constant_curvature_series(const SubRiemannianStructure& s, const CheckOptions& opt,
                                              ProbeCache* probes = nullptr);
FormulaReport check_einstein_umbilical(const SubRiemannianStructure& s, const CheckOptions& opt,
                                       ProbeCache* probes = nullptr);
FormulaReport check_codim1(const SubRiemannianStructure& s, int r, const CheckOptions& opt,
                           ProbeCache* probes = nullptr);
FormulaReport check_reeb(const SubRiemannianStructure& s, const CheckOptions& opt, ProbeCache* probes = nullptr);
FormulaReport check_hypotheses(const SubRiemannianStructure& s, const CheckOptions& opt, ProbeCache* probes = nullptr);
/// Z-derivative lemma and the Codazzi-type equation at `samples` random (point, xi).
FormulaReport check_lemma31(const SubRiemannianStructure& s, const CheckOptions& opt, int samples = 100,
                            ProbeCache* probes = nullptr);
/// Closed divergence forms against the direct divergence, the divergence
/// splitting for leaf fields, and the pointwise theorem oracles.
FormulaReport check_divergence_oracles(const SubRiemannianStructure& s, const CheckOptions& opt, int samples = 100,
                                       ProbeCache* probes = nullptr);

/// Deterministic pseudo-random recipe of arity n.
CoefficientRecipe random_recipe(int n, unsigned long long seed);

/// Generalized binomial coefficient C(x, k).
double binomial(double x, int k);

}  // namespace folint
