#pragma once

// Periodic grids on the torus and its coordinate leaves, quadrature on unit
// spheres of dimension p-1, closed-form sphere moments, and deterministic
// parallel accumulation.

#include <functional>
#include <span>
#include <vector>

#include "folint/geometry.hpp"
#include "folint/structure.hpp"

namespace folint {

/// Uniform periodic grid on [0, 2 pi)^d.
class GridScheme {
 public:
  explicit GridScheme(std::vector<int> counts);
  static GridScheme uniform(int dim, int count);

  int dim() const { return static_cast<int>(counts_.size()); }
  const std::vector<int>& counts() const { return counts_; }
  long long size() const { return size_; }
  /// Node coordinates, last axis fastest.
  std::vector<double> node(long long index) const;
  /// Product of the per-axis weights 2 pi / N.
  double weight() const { return weight_; }

 private:
  std::vector<int> counts_;
  long long size_ = 1;
  double weight_ = 1.0;
};

/// Nodes y on S^{p-1} (NF-frame coefficients) with weights.
class SphereScheme {
 public:
  /// p = 1: {+1, -1}. p = 2: `resolution` angles. p = 3: resolution/2
  /// Gauss-Legendre nodes in cos(theta) times `resolution` angles.
  SphereScheme(int p, int resolution);

  int p() const { return p_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& node(std::size_t k) const { return nodes_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }
  double total_weight() const;

 private:
  int p_, resolution_;
  std::vector<std::vector<double>> nodes_;
  std::vector<double> weights_;
};

/// vol(S^{p-1}) = 2 pi^{p/2} / Gamma(p/2).
double sphere_volume(int p);

/// Integral of y^lambda over the unit sphere of R^p, p = lambda.size().
double moment_integral(std::span<const int> lambda);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

/// Worker count from FOLINT_THREADS, else the hardware concurrency.
int thread_count();

/// Evaluates `f(k)` for k in [0, count) on the worker pool and returns the
/// results in index order. The first failure is rethrown with its node index.
std::vector<std::vector<double>> parallel_evaluate(long long count,
                                                   const std::function<std::vector<double>(long long)>& f);

using PointIntegrand = std::function<std::vector<double>(std::span<const double> point)>;
using FiberIntegrand = std::function<double(std::span<const double> y)>;

/// Component-wise sum of w * f(node) * sqrt(det g(node)) in node order.
std::vector<double> integrate_torus_multi(const PointIntegrand& f, const MetricField& g, const GridScheme& grid);
double integrate_torus(const std::function<double(std::span<const double>)>& f, const MetricField& g,
                       const GridScheme& grid);

/// Leaf through `basepoint`: the first n coordinates vary on an n-dimensional
/// grid, the others stay fixed; weight sqrt(det g restricted to TF).
std::vector<double> integrate_leaf_multi(const PointIntegrand& f, const SubRiemannianStructure& s,
                                         std::span<const double> basepoint, const GridScheme& leaf_grid);
double integrate_leaf(const std::function<double(std::span<const double>)>& f, const SubRiemannianStructure& s,
                      std::span<const double> basepoint, const GridScheme& leaf_grid);

/// sum_k w_k f(y_k).
double integrate_fiber(const FiberIntegrand& f, const SphereScheme& sphere);

/// Integral over the unit normal bundle by nesting the fiber rule in the grid.
double integrate_bundle(const std::function<double(std::span<const double> point, std::span<const double> y)>& f,
                        const SubRiemannianStructure& s, const GridScheme& grid, const SphereScheme& sphere);

}  // namespace folint
