#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "renyi/analysis.hpp"
#include "renyi/density.hpp"
#include "renyi/errors.hpp"
#include "renyi/oracle.hpp"
#include "renyi/partition.hpp"
#include "renyi/thermo.hpp"

namespace renyi::cli {
namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> alphas_below_one(const RunConfig& cfg) {
  if (cfg.alpha && *cfg.alpha < 1.0) return {*cfg.alpha};
  return {0.3, 0.5, 0.8};
}

struct NamedRef {
  ReferenceDistribution ref;
  std::vector<double> ms;
  double grid_hi;
};

std::vector<NamedRef> standard_refs() {
  return {{make_builtin(Family::uniform, {0.0, 1.0}), {0.35, 0.45, 0.6}, 1.0},
          {make_builtin(Family::exponential, {1.0}), {0.6, 0.8, 0.9}, 20.0}};
}

SuiteResult normalization(const RunConfig& cfg) {
  SuiteResult r{"normalization", true, 0.0, 1.0, 0, ""};
  double worst_mass = 0.0, worst_mean = 0.0, worst_dual = 0.0;
  for (const auto& nr : standard_refs()) {
    const std::vector<double> ms = cfg.m ? std::vector<double>{*cfg.m} : nr.ms;
    for (Kind kind : {Kind::C, Kind::G})
      for (double a : alphas_below_one(cfg))
        for (double m : ms) {
          ++r.cases;
          try {
            const auto sol = solve(ProblemSpec(kind, a, m, nr.ref));
            worst_mass = std::max(worst_mass, std::abs(total_mass(sol.density) - 1.0));
            worst_mean = std::max(worst_mean, std::abs(sol.achieved_mean - m));
            worst_dual = std::max(worst_dual, std::abs(sol.divergence + std::log(sol.Z_dual)));
          } catch (const Error& e) {
            r.passed = false;
            r.detail += nr.ref.label() + " " + to_string(kind) + " alpha=" + sci(a) + " m=" + sci(m) + ": " + e.what() + "; ";
          }
        }
  }
  r.residual = std::max({worst_mass / 1e-8, worst_mean / 1e-6, worst_dual / 1e-8});
  r.passed = r.passed && r.residual <= 1.0;
  r.detail += "mass " + sci(worst_mass) + ", mean " + sci(worst_mean) + ", divergence+logZ " + sci(worst_dual) +
              " (residual is the worst ratio to tolerance)";
  return r;
}

// Largest interval around zero on which Z_nu stays finite, clipped to [-cap, cap].
std::pair<double, double> defined_interval(double nu, const ReferenceDistribution& ref, double xbar, double cap) {
  auto ok = [&](double g) {
    try {
      return partition_value({nu, g, xbar, ref}).converged;
    } catch (const Error&) {
      return false;
    }
  };
  auto edge = [&](double dir) {
    double inside = 0.0, outside = dir * cap;
    if (ok(outside)) return outside;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (inside + outside);
      (ok(mid) ? inside : outside) = mid;
    }
    return inside;
  };
  return {edge(-1.0), edge(1.0)};
}

SuiteResult convexity(const RunConfig& cfg) {
  SuiteResult r{"convexity", true, 0.0, 1e-9, 0, ""};
  std::mt19937_64 rng(cfg.seed);
  for (const auto& nr : standard_refs()) {
    const double xbar = cfg.m.value_or(nr.ms[1]);
    const double cap = default_gamma_range(nr.ref).second;
    for (double a : alphas_below_one(cfg)) {
      const double xi = 1.0 / (a - 1.0);
      for (double nu : {xi + 1.0, -xi}) {
        auto [lo, hi] = defined_interval(nu, nr.ref, xbar, cap);
        // keep the bracket positive on the whole support
        const double a_lo = nr.ref.support().lower(), a_hi = nr.ref.support().upper();
        if (xbar > a_lo) hi = std::min(hi, 1.0 / (xbar - a_lo));
        if (a_hi > xbar) lo = std::max(lo, -1.0 / (a_hi - xbar));
        const double shrink = 0.1 * (hi - lo);
        std::uniform_real_distribution<double> pick(lo + shrink, hi - shrink);
        for (int t = 0; t < 100; ++t) {
          const double g1 = pick(rng), g2 = pick(rng);
          const double z1 = partition_value({nu, g1, xbar, nr.ref}).value;
          const double z2 = partition_value({nu, g2, xbar, nr.ref}).value;
          const double zm = partition_value({nu, 0.5 * (g1 + g2), xbar, nr.ref}).value;
          const double chord = 0.5 * (z1 + z2);
          r.residual = std::max(r.residual, (zm - chord) / std::max(1.0, chord));
          ++r.cases;
        }
      }
    }
  }
  r.passed = r.residual <= r.tolerance;
  r.detail = "midpoint excess over the chord, relative to max(1, chord)";
  return r;
}

SuiteResult duality(const RunConfig& cfg) {
  SuiteResult r{"duality", true, 0.0, 1e-6, 0, ""};
  std::vector<double> alphas{1.5, 2.0, 4.0};
  if (cfg.alpha) alphas = {*cfg.alpha > 1.0 ? *cfg.alpha : 1.0 / *cfg.alpha};
  const std::vector<double> ms = cfg.m ? std::vector<double>{*cfg.m} : std::vector<double>{0.55, 0.6, 0.65};
  const auto ref = make_builtin(Family::uniform, {0.0, 1.0});
  double worst_div = 0.0;
  for (double a : alphas)
    for (double m : ms) {
      ++r.cases;
      try {
        const auto rep = check_duality(solve(ProblemSpec(Kind::C, a, m, ref)), solve(ProblemSpec(Kind::G, 1.0 / a, m, ref)));
        r.residual = std::max({r.residual, rep.gamma_gap, rep.escort_gap_c, rep.escort_gap_g});
        worst_div = std::max({worst_div, rep.divergence_gap, rep.solution_divergence_gap});
      } catch (const Error& e) {
        r.passed = false;
        r.detail += "alpha=" + sci(a) + " m=" + sci(m) + ": " + e.what() + "; ";
      }
    }
  r.passed = r.passed && r.residual <= 1e-6 && worst_div <= 1e-8;
  r.detail += "gamma/escort gap " + sci(r.residual) + ", divergence gap " + sci(worst_div) + " (tolerance 1e-8)";
  return r;
}

SuiteResult legendre(const RunConfig& cfg) {
  SuiteResult r{"legendre", true, 0.0, 0.0, 0, ""};
  const double a = cfg.alpha.value_or(0.5);
  const std::vector<std::pair<ReferenceDistribution, double>> families{
      {make_builtin(Family::uniform, {0.0, 1.0}), 0.6}, {make_builtin(Family::exponential, {1.0}), 0.8}};
  LegendreOptions opts;
  opts.threads = cfg.threads;
  double worst_ratio = 0.0;
  for (const auto& [ref, centre] : families)
    for (Kind kind : {Kind::C, Kind::G}) {
      ++r.cases;
      const ProblemSpec spec(kind, a, cfg.m.value_or(centre), ref);
      const auto rep = legendre_check(spec, legendre_family(ref, spec.m(), cfg.count), opts);
      r.residual = std::max(r.residual, rep.max_residual());
      r.tolerance = std::max(r.tolerance, rep.tolerance);
      worst_ratio = std::max(worst_ratio, rep.max_residual() / rep.tolerance);
      if (!rep.passed) {
        r.passed = false;
        r.detail += ref.label() + " " + to_string(kind) + " failed; ";
      }
    }
  r.detail += "worst residual/tolerance " + sci(worst_ratio);
  return r;
}

SuiteResult oracle(const RunConfig& cfg) {
  SuiteResult r{"oracle", true, 0.0, 1e-3, 0, ""};
  const auto uni = make_builtin(Family::uniform, {0.0, 1.0});
  const auto ex = make_builtin(Family::exponential, {1.0});
  struct Case {
    const ReferenceDistribution* ref;
    Kind kind;
    double alpha, m, hi;
  };
  const std::vector<Case> cases{{&uni, Kind::C, 0.5, 0.7, 1.0}, {&uni, Kind::C, 1.5, 0.6, 1.0},
                                {&uni, Kind::G, 0.5, 0.6, 1.0}, {&uni, Kind::G, 2.0, 0.4, 1.0},
                                {&ex, Kind::C, 0.5, 0.7, 20.0}, {&ex, Kind::C, 2.0, 1.2, 20.0},
                                {&ex, Kind::G, 0.5, 0.8, 20.0}, {&ex, Kind::G, 0.8, 1.3, 20.0}};
  constexpr std::size_t n = 1000;
  double worst_tv = 0.0;
  for (const auto& c : cases) {
    ++r.cases;
    try {
      const auto sol = solve(ProblemSpec(c.kind, c.alpha, c.m, *c.ref));
      OracleOptions opts;
      opts.seed = cfg.seed;
      opts.threads = cfg.threads;
      const auto res = oracle_solve(make_grid_problem(*c.ref, n, c.alpha, c.m, c.kind, 0.0, c.hi), opts);
      double tv = 0.0;
      const double w = c.hi / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const IntervalSet cell =
            IntervalSet::single(w * static_cast<double>(i), w * static_cast<double>(i + 1)).intersect(sol.density.support());
        const double mass = cell.empty() ? 0.0 : integrate_over(sol.density, cell, sol.density.breakpoints(), {}).value;
        tv += std::abs(mass - res.weights[i]);
      }
      r.residual = std::max(r.residual, std::abs(res.divergence - sol.divergence));
      worst_tv = std::max(worst_tv, 0.5 * tv);
    } catch (const Error& e) {
      r.passed = false;
      r.detail += to_string(c.kind) + " alpha=" + sci(c.alpha) + ": " + e.what() + "; ";
    }
  }
  r.passed = r.passed && r.residual <= 1e-3 && worst_tv <= 1e-2;
  r.detail += "divergence gap " + sci(r.residual) + ", total variation " + sci(worst_tv) + " (tolerance 1e-2)";
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"normalization", "convexity", "duality", "legendre", "oracle"};
  return names;
}

SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
  if (name == "normalization") return normalization(cfg);
  if (name == "convexity") return convexity(cfg);
  if (name == "duality") return duality(cfg);
  if (name == "legendre") return legendre(cfg);
  if (name == "oracle") return oracle(cfg);
  throw UsageError("unknown suite '" + name + "'");
}

}  // namespace renyi::cli
