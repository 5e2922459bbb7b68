#include "folint/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "folint/error.hpp"

namespace folint {

namespace {

std::string point_string(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(x[i]);
  }
  return s + ")";
}

}  // namespace

GridScheme::GridScheme(std::vector<int> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw InputError("grid needs at least one axis");
  for (int c : counts_) {
    if (c < 4) throw InputError("grid needs at least 4 nodes per axis");
    size_ *= c;
    weight_ *= kTwoPi / c;
  }
}

GridScheme GridScheme::uniform(int dim, int count) { return GridScheme(std::vector<int>(static_cast<std::size_t>(dim), count)); }

std::vector<double> GridScheme::node(long long index) const {
  std::vector<double> x(counts_.size());
  for (int a = dim() - 1; a >= 0; --a) {
    const int c = counts_[static_cast<std::size_t>(a)];
    x[static_cast<std::size_t>(a)] = kTwoPi * static_cast<double>(index % c) / c;
    index /= c;
  }
  return x;
}

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  if (count < 1) throw InputError("Gauss-Legendre rule needs at least one node");
  nodes.assign(static_cast<std::size_t>(count), 0.0);
  weights.assign(static_cast<std::size_t>(count), 0.0);
  // P_count(x) and its derivative by the three-term recurrence
  const auto legendre = [count](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= count; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = count * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(count - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(count - 1 - i)] = w;
  }
  if (count % 2 == 1) nodes[static_cast<std::size_t>(count / 2)] = 0.0;
}

SphereScheme::SphereScheme(int p, int resolution) : p_(p), resolution_(resolution) {
  if (p < 1 || p > 3) throw InputError("sphere schemes exist for p = 1, 2, 3");
  if (p == 1) {
    resolution_ = 2;
    nodes_ = {{1.0}, {-1.0}};
    weights_ = {1.0, 1.0};
    return;
  }
  if (resolution < 4 || resolution % 2 != 0) throw InputError("sphere resolution must be even and at least 4");
  const double dphi = kTwoPi / resolution;
  if (p == 2) {
    for (int k = 0; k < resolution; ++k) {
      nodes_.push_back({std::cos(k * dphi), std::sin(k * dphi)});
      weights_.push_back(dphi);
    }
    return;
  }
  std::vector<double> z, wz;
  gauss_legendre(resolution / 2, z, wz);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double rho = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
    for (int k = 0; k < resolution; ++k) {
      nodes_.push_back({rho * std::cos(k * dphi), rho * std::sin(k * dphi), z[i]});
      weights_.push_back(wz[i] * dphi);
    }
  }
}

double SphereScheme::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double sphere_volume(int p) {
  if (p < 1) throw InputError("sphere dimension must be positive");
  if (p == 1) return 2.0;
  if (p == 2) return kTwoPi;
  if (p == 3) return 2.0 * kTwoPi;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * p) / std::tgamma(0.5 * p);
}

double moment_integral(std::span<const int> lambda) {
  if (lambda.empty()) throw InputError("moment multi-index must be non-empty");
  double total = 0.0;
  double prod = 1.0;
  for (int l : lambda) {
    if (l < 0) throw InputError("moment exponents must be non-negative");
    if (l % 2 != 0) return 0.0;
    total += l;
    prod *= std::tgamma(0.5 * (1.0 + l));
  }
  return 2.0 * prod / std::tgamma(0.5 * (static_cast<double>(lambda.size()) + total));
}

int thread_count() {
  if (const char* env = std::getenv("FOLINT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min(v, 256L));
    throw InputError("FOLINT_THREADS must be a positive integer");
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<std::vector<double>> parallel_evaluate(long long count,
                                                   const std::function<std::vector<double>(long long)>& f) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(count));
  const int workers = static_cast<int>(std::min<long long>(thread_count(), std::max(1LL, count)));
  std::atomic<long long> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  long long fail_index = -1;
  std::exception_ptr fail;
  const auto run = [&] {
    while (!failed.load()) {
      const long long k = next.fetch_add(1);
      if (k >= count) break;
      try {
        out[static_cast<std::size_t>(k)] = f(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (fail_index < 0 || k < fail_index) {
          fail_index = k;
          fail = std::current_exception();
        }
        failed.store(true);
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  if (fail) std::rethrow_exception(fail);
  return out;
}

namespace {

// Neumaier-compensated sums in row order.
std::vector<double> accumulate(const std::vector<std::vector<double>>& rows, double weight) {
  std::vector<double> sum, comp;
  for (const auto& r : rows) {
    if (sum.empty()) {
      sum.assign(r.size(), 0.0);
      comp.assign(r.size(), 0.0);
    }
    if (r.size() != sum.size()) throw InputError("integrand returned a varying number of components");
    for (std::size_t c = 0; c < r.size(); ++c) {
      const double t = sum[c] + r[c];
      comp[c] += std::abs(sum[c]) >= std::abs(r[c]) ? (sum[c] - t) + r[c] : (r[c] - t) + sum[c];
      sum[c] = t;
    }
  }
  for (std::size_t c = 0; c < sum.size(); ++c) sum[c] = (sum[c] + comp[c]) * weight;
  return sum;
}

}  // namespace

std::vector<double> integrate_torus_multi(const PointIntegrand& f, const MetricField& g, const GridScheme& grid) {
  if (grid.dim() != g.dim()) throw InputError("grid dimension does not match the manifold");
  const int m = g.dim();
  const auto rows = parallel_evaluate(grid.size(), [&](long long k) {
    const auto x = grid.node(k);
    try {
      const double vol = std::sqrt(determinant(g.values(x), m));
      auto v = f(x);
      for (double& c : v) c *= vol;
      return v;
    } catch (const Error&) {
      rethrow_with_context("at node " + point_string(x));
    }
  });
  return accumulate(rows, grid.weight());
}

double integrate_torus(const std::function<double(std::span<const double>)>& f, const MetricField& g,
                       const GridScheme& grid) {
  return integrate_torus_multi([&](std::span<const double> x) { return std::vector<double>{f(x)}; }, g, grid)[0];
}

std::vector<double> integrate_leaf_multi(const PointIntegrand& f, const SubRiemannianStructure& s,
                                         std::span<const double> basepoint, const GridScheme& leaf_grid) {
  const int m = s.dim(), n = s.n();
  if (static_cast<int>(basepoint.size()) != m) throw InputError("leaf basepoint needs m coordinates");
  if (leaf_grid.dim() != n) throw InputError("leaf grid dimension must equal the leaf dimension n");
  const auto rows = parallel_evaluate(leaf_grid.size(), [&](long long k) {
    const auto u = leaf_grid.node(k);
    std::vector<double> x(basepoint.begin(), basepoint.end());
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)];
    try {
      const auto gv = s.metric().values(x);
      std::vector<double> gf(static_cast<std::size_t>(n * n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gf[static_cast<std::size_t>(i * n + j)] = gv[static_cast<std::size_t>(i * m + j)];
      const double vol = std::sqrt(determinant(gf, n));
      auto v = f(x);
      for (double& c : v) c *= vol;
      return v;
    } catch (const Error&) {
      rethrow_with_context("at leaf node " + point_string(x));
    }
  });
  return accumulate(rows, leaf_grid.weight());
}

double integrate_leaf(const std::function<double(std::span<const double>)>& f, const SubRiemannianStructure& s,
                      std::span<const double> basepoint, const GridScheme& leaf_grid) {
  return integrate_leaf_multi([&](std::span<const double> x) { return std::vector<double>{f(x)}; }, s, basepoint,
                              leaf_grid)[0];
}

double integrate_fiber(const FiberIntegrand& f, const SphereScheme& sphere) {
  double s = 0.0;
  for (std::size_t k = 0; k < sphere.size(); ++k) {
    try {
      s += sphere.weight(k) * f(sphere.node(k));
    } catch (const Error&) {
      rethrow_with_context("at fiber node " + point_string(sphere.node(k)));
    }
  }
  return s;
}

double integrate_bundle(const std::function<double(std::span<const double>, std::span<const double>)>& f,
                        const SubRiemannianStructure& s, const GridScheme& grid, const SphereScheme& sphere) {
  if (sphere.p() != s.p()) throw InputError("sphere scheme dimension does not match p");
  return integrate_torus(
      [&](std::span<const double> x) { return integrate_fiber([&](std::span<const double> y) { return f(x, y); }, sphere); },
      s.metric(), grid);
}

}  // namespace folint
