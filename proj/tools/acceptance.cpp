// Acceptance runner: one PASS/FAIL line per criterion, details indented below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "expr_corpus.hpp"
#include "folint/cli.hpp"
#include "folint/error.hpp"
#include "newton_identities.hpp"

using namespace folint;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
  fmt::print("criterion {} {} {}\n", id, ok ? "PASS" : "FAIL", what);
  if (!ok) ++failures;
}

void detail(const std::string& line) { fmt::print("    {}\n", line); }

CheckOptions options(std::vector<int> grid, int sphere) {
  CheckOptions o;
  o.grid = std::move(grid);
  o.sphere = sphere;
  return o;
}

FormulaReport run(const SubRiemannianStructure& s, const std::string& id, const CheckOptions& o, ProbeCache& probes,
                  int samples = 100) {
  CheckRequest req;
  req.formula = id;
  req.options = o;
  req.samples = samples;
  return run_formula(s, req, probes);
}

void flat_exactness() {
  const auto t0 = Clock::now();
  double worst = 0.0, probe = 0.0;
  int checks = 0;
  std::string worst_id = "none";
  for (const char* name : {"flat-torus-3-1-1", "flat-torus-4-2-1"}) {
    const auto s = build_structure(builtin_manifold(name));
    const auto o = options({s.dim() == 4 ? 6 : 8}, 8);
    ProbeCache probes(s, o.probe);
    for (const auto& h : probes.get()) probe = std::max(probe, h.violation);
    CheckRequest base;
    base.options = o;
    auto ids = all_formula_ids(s, base);
    for (int seed = 1001; seed <= 1005; ++seed) ids.push_back("closed-general(random(" + std::to_string(seed) + "))");
    for (const auto& id : ids) {
      const auto rep = run(s, id, o, probes);
      if (rep.status == "inapplicable") continue;
      ++checks;
      const double r = rep.status == "evaluated" ? std::abs(rep.residual) : INFINITY;
      if (r > worst) {
        worst = r;
        worst_id = std::string(name) + " " + id;
      }
    }
  }
  const double t = seconds_since(t0);
  verdict(1, worst < 1e-12 && probe == 0.0 && t < 10.0,
          fmt::format("flat splittings: {} checks, max |residual| {:.3g} ({}), max probe violation {:.3g}, {:.2f} s",
                      checks, worst, worst_id, probe, t));
}

void generic_metric() {
  const auto t0 = Clock::now();
  const auto s = build_structure(builtin_manifold("full-tangent-3"));
  ProbeCache probes(s, ProbeOptions{});
  bool ok = true;
  for (const char* id : {"closed-newton(0)", "closed-general(random(1001))", "closed-general(random(1002))", "pw"}) {
    std::vector<double> rel;
    for (int g : {8, 16, 24}) rel.push_back(run(s, id, options({g}, 64), probes).relative_residual);
    bool monotone = true;
    for (std::size_t k = 1; k < rel.size(); ++k) monotone = monotone && rel[k] <= rel[k - 1] + 1e-12;
    const bool pass = rel.back() < 1e-8 && monotone;
    ok = ok && pass;
    detail(fmt::format("{}: relative residual {:.3g} / {:.3g} / {:.3g} at grids 8/16/24{}", id, rel[0], rel[1], rel[2],
                       monotone ? "" : " (not monotone)"));
  }
  const double t = seconds_since(t0);
  verdict(2, ok && t < 120.0, fmt::format("generic metric on full-tangent-3, sphere 64: {:.1f} s", t));
}

void leafwise() {
  const auto s = build_structure(builtin_manifold("warped-torus"));
  ProbeCache probes(s, ProbeOptions{});
  const std::vector<std::vector<double>> bases = {{0.0, 0.0}, {1.0, 0.5}, {2.0, 1.5}, {3.5, 2.5}, {5.0, 4.0}};
  double worst = 0.0;
  for (const char* id : {"leafwise(newton(0))", "leafwise(newton(1))"})
    for (const auto& b : bases) {
      auto o = options({64}, 8);
      o.leaf = b;
      const auto rep = run(s, id, o, probes);
      worst = std::max(worst, rep.status == "evaluated" ? rep.relative_residual : INFINITY);
    }
  verdict(3, worst < 1e-8,
          fmt::format("leafwise on warped-torus, 5 leaves, r = 0, 1, leaf grid 64: max relative residual {:.3g}", worst));
}

std::vector<std::pair<std::string, FormulaReport>> oracle_reports;

void divergence_oracles() {
  double worst = 0.0, derived = 0.0;
  for (const auto& spec : builtin_manifolds()) {
    const auto s = build_structure(spec);
    ProbeCache probes(s, ProbeOptions{});
    const auto rep = check_divergence_oracles(s, options({8}, 8), 100, &probes);
    worst = std::max(worst, rep.relative_residual);
    derived = std::max(derived, rep.value("derived_forms_relative_error"));
    detail(fmt::format("{}: printed forms {:.3g} (A^k {:.3g}, T_r {:.3g}, general {:.3g}), derived forms {:.3g}",
                       spec.name, rep.relative_residual, rep.value("Ak_printed_relative_error"),
                       rep.value("newton_closed_relative_error"), rep.value("general_printed_relative_error"),
                       rep.value("derived_forms_relative_error")));
    oracle_reports.emplace_back(spec.name, rep);
  }
  verdict(4, worst < 1e-8,
          fmt::format("closed divergence forms vs direct divergence, 100 samples per builtin: max relative error {:.3g} "
                      "(derived-sign forms {:.3g})",
                      worst, derived));
}

void lemma_suite() {
  const auto nt = folint::test::newton_identity_errors(42, 1000);
  const double ntw = *std::max_element(nt.begin(), nt.end());
  detail(fmt::format("Newton identities on 1000 matrices: {:.3g} {:.3g} {:.3g} {:.3g} {:.3g}", nt[0], nt[1], nt[2],
                     nt[3], nt[4]));
  double codazzi = 0.0, split = 0.0;
  for (const auto& spec : builtin_manifolds()) {
    const auto s = build_structure(spec);
    ProbeCache probes(s, ProbeOptions{});
    const auto rep = check_lemma31(s, options({8}, 8), 100, &probes);
    codazzi = std::max(codazzi, rep.value("codazzi_max_residual"));
  }
  for (const auto& [name, rep] : oracle_reports)
    split = std::max({split, rep.value("splitting_frame_max_error"), rep.value("splitting_coordinate_max_error")});
  verdict(5, ntw < 1e-10 && codazzi < 1e-8 && split < 1e-9,
          fmt::format("Newton identities {:.3g}, Codazzi-type residual {:.3g}, divergence splitting {:.3g}", ntw, codazzi,
                      split));
}

void moments() {
  double worst = 0.0;
  for (int p = 1; p <= 3; ++p) {
    const SphereScheme sph(p, 32);
    std::vector<int> l(static_cast<std::size_t>(p), 0);
    const auto rec = [&](auto&& self, int a, int left) -> void {
      if (a == p) {
        const double q = integrate_fiber(
            [&](std::span<const double> y) {
              double v = 1.0;
              for (int b = 0; b < p; ++b) v *= std::pow(y[static_cast<std::size_t>(b)], l[static_cast<std::size_t>(b)]);
              return v;
            },
            sph);
        worst = std::max(worst, std::abs(q - moment_integral(l)));
        return;
      }
      for (int e = 0; e <= left; ++e) {
        l[static_cast<std::size_t>(a)] = e;
        self(self, a + 1, left - e);
      }
    };
    rec(rec, 0, 4);
  }
  const int zero[] = {0, 0};
  const double i00 = std::abs(moment_integral(zero) - kTwoPi);
  const double q00 = std::abs(SphereScheme(2, 32).total_weight() - kTwoPi);
  verdict(6, worst < 1e-10 && i00 < 1e-13 && q00 < 1e-13,
          fmt::format("sphere moments |lambda| <= 4, p = 1..3: max error {:.3g}; I_00 error {:.3g}, scheme {:.3g}", worst,
                      i00, q00));
}

void series() {
  bool ok = true;
  for (const char* name : {"flat-torus-3-1-1", "flat-torus-4-2-1", "block-product"}) {
    const auto s = build_structure(builtin_manifold(name));
    const auto o = options({s.dim() == 4 ? 8 : 16}, 16);
    ProbeCache probes(s, o.probe);
    for (const char* id : {"const-curv", "einstein-umbilical"}) {
      const auto rep = run(s, id, o, probes);
      const double fitted = std::abs(rep.value(std::string(id) == "const-curv" ? "fitted_c" : "fitted_C"));
      const bool pass = rep.hypotheses_met() && fitted < 1e-10 && rep.residual < 1e-9;
      ok = ok && pass;
      detail(fmt::format("{} {}: {}, fitted constant {:.3g}, series discrepancy {:.3g}, recursion {:.3g}, "
                         "as printed {:.3g}",
                         name, id, rep.status, fitted, rep.residual, rep.value("recursion_discrepancy"),
                         rep.value("paper_form_discrepancy")));
    }
  }
  double odd = 0.0;
  for (const auto& spec : builtin_manifolds()) {
    const auto s = build_structure(spec);
    const GridScheme g = GridScheme::uniform(s.dim(), s.dim() == 4 ? 8 : 16);
    const SphereScheme sph(s.p(), 16);
    for (int k = 1; k <= s.n() + 2; k += 2) {
      if (k <= s.n()) odd = std::max(odd, std::abs(total_mean_curvature(s, k, MeanKind::kSigma, g, sph)));
      odd = std::max(odd, std::abs(total_mean_curvature(s, k, MeanKind::kTau, g, sph)));
    }
  }
  detail(fmt::format("odd total mean curvatures over all builtins: max {:.3g}", odd));
  verdict(7, ok && odd < 1e-12, "constant-curvature and Einstein series, odd total mean curvatures");
}

void codimension_one() {
  const auto w = build_structure(builtin_manifold("warped-torus"));
  ProbeCache pw(w, ProbeOptions{});
  const auto a = run(w, "codim1(0)", options({16}, 8), pw);
  const auto s = build_structure(builtin_manifold("warped-surface"));
  ProbeCache ps(s, ProbeOptions{});
  const auto b = run(s, "codim1(0)", options({16}, 8), ps);
  const double k = std::abs(b.value("gaussian_P_integral"));
  verdict(8, a.passed(1e-8) && a.relative_residual < 1e-8 && k < 1e-9,
          fmt::format("codim1(0) on warped-torus: relative residual {:.3g}; integral of K^P on warped-surface {:.3g} "
                      "(of |K^P| {:.3g})",
                      a.relative_residual, k, b.value("gaussian_P_abs_integral")));
}

void parser_and_determinism() {
  const ParameterTable params = {{"eps", 0.3}, {"a", 2.0}, {"eps_2", 0.5}};
  int good = 0, bad = 0;
  for (const auto& c : corpus::positives()) {
    try {
      const double v = Expression::parse(c.text).evaluate(corpus::kCorpusPoint, params);
      if (std::abs(v - c.expected) <= 1e-15 * std::max(1.0, std::abs(c.expected))) ++good;
    } catch (const Error&) {
    }
  }
  for (const auto& c : corpus::negatives()) {
    try {
      Expression::parse(c.text);
    } catch (const ParseError& e) {
      if (e.offset() == c.offset) ++bad;
    }
  }
  setenv("FOLINT_THREADS", "1", 1);
  const auto document = [] {
    const auto s = build_structure(builtin_manifold("full-tangent-3"));
    ProbeCache probes(s, ProbeOptions{});
    Json reports = Json::array();
    CheckRequest base;
    base.options = options({8}, 8);
    base.samples = 20;
    for (const auto& id : all_formula_ids(s, base))
      reports.push_back(report_json(run(s, id, base.options, probes, 20), 1e-8, false));
    return dump_json(reports);
  };
  const std::string first = document(), second = document();
  verdict(9, good == 30 && bad == 20 && first == second,
          fmt::format("grammar corpus {}/30 positive, {}/20 negative; repeated single-threaded report {} ({} bytes)", good,
                      bad, first == second ? "byte-identical" : "differs", first.size()));
}

}  // namespace

int main() {
  try {
    flat_exactness();
    generic_metric();
    leafwise();
    divergence_oracles();
    lemma_suite();
    moments();
    series();
    codimension_one();
    parser_and_determinism();
  } catch (const std::exception& e) {
    fmt::print(stderr, "acceptance aborted: {}\n", e.what());
    return 2;
  }
  fmt::print("{} of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
