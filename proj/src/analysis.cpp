#include "renyi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "renyi/errors.hpp"
#include "renyi/solver.hpp"

namespace renyi {
namespace {

constexpr double kFloor = 1e-300;
constexpr double kMassTol = 1e-8;
constexpr double kSupportTol = 1e-12;

quad::Options analysis_tolerances() {
  quad::Options o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-13;
  return o;
}

double weighted_power(double p, double q, double alpha) {
  if (p <= kFloor || q <= kFloor) return 0.0;
  if (alpha == 1.0) return p;
  if (alpha == 0.0) return q;
  return std::exp(alpha * std::log(p) + (1.0 - alpha) * std::log(q));
}

std::vector<double> pair_breaks(const Density& p, const Density& q) {
  return merge_points(p.breakpoints(), q.breakpoints());
}

std::vector<double> pair_singular(const Density& p, const Density& q) {
  return merge_points(p.singular_points(), q.singular_points());
}

// Every interval of a lies within tol of some interval of b.
bool covered(const IntervalSet& a, const IntervalSet& b) {
  for (const auto& iv : a.intervals()) {
    const double tol = kSupportTol * std::max({1.0, std::abs(iv.lo), std::abs(iv.hi)});
    bool inside = false;
    for (const auto& jv : b.intervals())
      if (iv.lo >= jv.lo - tol && iv.hi <= jv.hi + tol) inside = true;
    if (!inside) return false;
  }
  return true;
}

void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) throw InvalidParameter("alpha", "must be > 0");
  if (alpha == 1.0) throw InvalidParameter("alpha", "alpha = 1 is excluded; use kl_divergence");
}

void check_support(const DensityPair& pair, double alpha) {
  if (alpha < 1.0) {
    if (!(pair.common_domain.total_length() > 0.0))
      throw DivergentIntegral("densities have no common support", pair.p.support().lower());
  } else if (!covered(pair.p.support(), pair.q.support())) {
    throw DivergentIntegral("support of P is not contained in the support of Q (" + pair.p.support().to_string() +
                                " vs " + pair.q.support().to_string() + ")",
                            pair.p.support().lower());
  }
}

}  // namespace

DensityPair make_density_pair(const Density& p, const Density& q) {
  for (const Density* d : {&p, &q}) {
    const double mass = total_mass(*d, analysis_tolerances());
    if (std::abs(mass - 1.0) > kMassTol) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "density integrates to %.17g, not 1", mass);
      throw PreconditionViolation(buf);
    }
  }
  return DensityPair{p, q, p.support().intersect(q.support())};
}

double power_overlap(const DensityPair& pair, double alpha) {
  const auto breaks = pair_breaks(pair.p, pair.q);
  const auto sing = pair_singular(pair.p, pair.q);
  return integrate_over([&](double x) { return weighted_power(pair.p(x), pair.q(x), alpha); }, pair.common_domain,
                        breaks, sing, analysis_tolerances())
      .value;
}

double renyi_divergence(const DensityPair& pair, double alpha) {
  check_alpha(alpha);
  check_support(pair, alpha);
  const double overlap = power_overlap(pair, alpha);
  if (!(overlap > 0.0) || !std::isfinite(overlap))
    throw DivergentIntegral("power overlap is not positive and finite", pair.common_domain.lower());
  return std::log(overlap) / (alpha - 1.0);
}

double tsallis_divergence(const DensityPair& pair, double alpha) {
  check_alpha(alpha);
  check_support(pair, alpha);
  return (power_overlap(pair, alpha) - 1.0) / (alpha - 1.0);
}

double kl_divergence(const DensityPair& pair) {
  check_support(pair, 2.0);
  const auto breaks = pair_breaks(pair.p, pair.q);
  const auto sing = pair_singular(pair.p, pair.q);
  auto f = [&](double x) {
    const double p = pair.p(x);
    if (p <= kFloor) return 0.0;
    const double q = pair.q(x);
    if (q <= kFloor) return 0.0;
    return p * (std::log(p) - std::log(q));
  };
  return integrate_over(f, pair.common_domain, breaks, sing, analysis_tolerances()).value;
}

double tsallis_entropy(const Density& p, double alpha, const IntervalSet& domain) {
  check_alpha(alpha);
  const quad::Result r = integrate_over(
      [&](double x) {
        const double v = p(x);
        return v <= kFloor ? 0.0 : std::pow(v, alpha);
      },
      domain, p.breakpoints(), p.singular_points(), analysis_tolerances());
  if (!r.converged || !std::isfinite(r.value)) throw DivergentIntegral("integral of p^alpha diverges", domain.lower());
  return (r.value - 1.0) / (1.0 - alpha);
}

Density escort(const Density& p, const Density& q, double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0) throw InvalidParameter("alpha", "escort index must be >= 0");
  const IntervalSet common = p.support().intersect(q.support());
  const auto breaks = pair_breaks(p, q);
  const auto sing = pair_singular(p, q);
  const double norm = integrate_over([&](double x) { return weighted_power(p(x), q(x), alpha); }, common, breaks,
                                     sing, analysis_tolerances())
                          .value;
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error("escort normalizer is zero or not finite");
  const double inv = 1.0 / norm;
  return Density([p, q, alpha, inv](double x) { return weighted_power(p(x), q(x), alpha) * inv; }, common, breaks,
                 sing);
}

double escort_log_ratio_mean(const DensityPair& pair, double alpha) {
  const auto breaks = pair_breaks(pair.p, pair.q);
  const auto sing = pair_singular(pair.p, pair.q);
  const auto opts = analysis_tolerances();
  const double norm = power_overlap(pair, alpha);
  const double num = integrate_over(
                         [&](double x) {
                           const double p = pair.p(x), q = pair.q(x);
                           const double w = weighted_power(p, q, alpha);
                           return w == 0.0 ? 0.0 : w * (std::log(p) - std::log(q));
                         },
                         pair.common_domain, breaks, sing, opts)
                         .value;
  return num / norm;
}

double sup_distance(const Density& a, const Density& b, const IntervalSet& where, std::size_t points) {
  const double lo = where.lower(), hi = where.upper();
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(points);
    const double da = a(x), db = b(x);
    if (da <= kFloor && db <= kFloor) continue;
    worst = std::max(worst, std::abs(da - db));
  }
  return worst;
}

double DualityReport::max_entry() const {
  return std::max({gamma_gap, escort_gap_g, escort_gap_c, divergence_gap, solution_divergence_gap});
}

DualityReport check_duality(const TsallisSolution& sol_c, const TsallisSolution& sol_g) {
  if (sol_c.spec.kind() != Kind::C || sol_g.spec.kind() != Kind::G)
    throw IndexMismatch("check_duality expects a kind C and a kind G solution");
  const double a1 = sol_c.spec.alpha();
  const double a2 = sol_g.spec.alpha();
  if (std::abs(a2 - 1.0 / a1) > 1e-12) throw IndexMismatch("generalized index must equal 1/alpha of the classical");
  if (std::abs(sol_c.spec.m() - sol_g.spec.m()) > 1e-12) throw IndexMismatch("mean constraints differ");
  if (sol_c.spec.ref().label() != sol_g.spec.ref().label()) throw IndexMismatch("reference distributions differ");

  const Density& q = sol_c.spec.ref().density();
  const Density escort_c = escort(sol_c.density, q, a1);
  const Density escort_g = escort(sol_g.density, q, a2);
  const IntervalSet& where = q.support();

  DualityReport r{};
  r.gamma_gap = std::abs(sol_c.gamma_star - sol_g.gamma_star);
  r.escort_gap_g = sup_distance(sol_g.density, escort_c, where);
  r.escort_gap_c = sup_distance(sol_c.density, escort_g, where);
  const double d_c = renyi_divergence(make_density_pair(sol_c.density, q), a1);
  const double d_escort = renyi_divergence(make_density_pair(escort_c, q), 1.0 / a1);
  const double d_g = renyi_divergence(make_density_pair(sol_g.density, q), a2);
  r.divergence_gap = std::abs(d_escort - d_c);
  r.solution_divergence_gap = std::abs(d_g - d_c);
  return r;
}

}  // namespace renyi
