#include "renyi/solver.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "renyi/analysis.hpp"
#include "renyi/errors.hpp"
#include "renyi/partition.hpp"

namespace renyi {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMeanTol = 1e-6;
constexpr double kBoundaryTol = 1e-12;
constexpr double kGammaRelTol = 1e-10;

PartitionQuery query(const ProblemSpec& spec, double nu, double gamma) {
  return PartitionQuery{nu, gamma, spec.m(), spec.ref()};
}

// Z_nu(gamma, m) or +inf when undefined.
double partition_or_inf(const ProblemSpec& spec, double nu, double gamma) {
  const PartitionQuery q = query(spec, nu, gamma);
  if (domain_status(q) != DomainStatus::ok) return kInf;
  const PartitionResult r = partition_value(q);
  return r.converged ? r.value : kInf;
}

double objective(const ProblemSpec& spec, double gamma) {
  if (!dual_defined(gamma, spec)) return kInf;
  return partition_or_inf(spec, spec.objective_exponent(), gamma);
}

// Proportional to dZ_obj/dgamma: the centred moment under the constraint exponent.
double stationarity(const ProblemSpec& spec, double gamma) {
  return centered_moment(query(spec, spec.constraint_exponent(), gamma));
}

struct Bracket {
  double lo;
  double hi;
};

// Golden-section minimization of a unimodal f on [a, b]; returns the final bracket.
template <class F>
Bracket golden_section(F&& f, double a, double b, double rel_width) {
  constexpr double inv_phi = 0.6180339887498948482;  // 1/phi
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 400; ++it) {
    if (b - a <= rel_width * std::max(1.0, std::abs(0.5 * (a + b)))) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return {a, b};
}

template <class F>
double root_in(F&& f, double a, double b, double fa, double fb, double rel_tol) {
  auto tol = [rel_tol](double x, double y) { return std::abs(x - y) <= rel_tol * std::max(1.0, std::abs(x)); };
  // infinite end values (moments overflowing at a domain edge) are bisected away first
  for (int k = 0; k < 200 && !(std::isfinite(fa) && std::isfinite(fb)); ++k) {
    const double c = 0.5 * (a + b);
    if (c == a || c == b) return c;
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc < 0.0) == (fa < 0.0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
      fb = fc;
    }
  }
  if (tol(a, b)) return 0.5 * (a + b);
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  return 0.5 * (r.first + r.second);
}

// Largest point of [defined, undefined] (ordered either way) where pred holds, to tol.
template <class P>
double refine_boundary(P&& defined, double inside, double outside, double tol) {
  while (std::abs(outside - inside) > tol) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (defined(mid)) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

IntervalMaximum maximize_on(const ProblemSpec& spec, double a, double b) {
  auto f = [&](double g) { return objective(spec, g); };
  IntervalMaximum best{a, kNegInf, false};
  if (!(b > a)) {
    best.value = dual_value(a, spec);
    return best;
  }

  const Bracket br = golden_section(f, a, b, 1e-7);
  double lo = br.lo, hi = br.hi;
  auto s = [&](double g) { return stationarity(spec, g); };
  // Z_obj' has the sign of nu_obj * s; it is negative left of the minimum.
  const double sign = spec.objective_exponent() > 0.0 ? 1.0 : -1.0;
  auto deriv = [&](double g) { return sign * s(g); };

  double dlo = deriv(lo), dhi = deriv(hi);
  double step = std::max(hi - lo, 1e-9 * std::max(1.0, std::abs(lo)));
  for (int k = 0; k < 60 && !(dlo <= 0.0 && dhi >= 0.0); ++k) {
    if (dlo > 0.0) {
      if (lo <= a) break;
      lo = std::max(a, lo - step);
      dlo = deriv(lo);
    }
    if (dhi < 0.0) {
      if (hi >= b) break;
      hi = std::min(b, hi + step);
      dhi = deriv(hi);
    }
    step *= 2.0;
  }
  if (dlo <= 0.0 && dhi >= 0.0) {
    const double g = (dlo == 0.0) ? lo : (dhi == 0.0) ? hi : root_in(deriv, lo, hi, dlo, dhi, 1e-13);
    best = {g, dual_value(g, spec), true};
    const bool at_edge = g <= a || g >= b;
    if (at_edge) best.interior = false;
  } else {
    const double g = dlo > 0.0 ? lo : hi;
    best = {g, dual_value(g, spec), false};
  }
  if (!std::isfinite(best.value)) {
    const double g = 0.5 * (br.lo + br.hi);
    best = {g, dual_value(g, spec), false};
  }
  return best;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TsallisSolution build_solution(const ProblemSpec& spec, double gamma, bool interior, Route route) {
  const ReferenceDistribution& ref = spec.ref();
  const double nu = spec.density_exponent();
  const PartitionResult zs = partition_value(query(spec, nu, gamma));
  const PartitionResult zd = partition_value(query(spec, spec.escort_exponent(), gamma));
  if (!zs.converged || !zd.converged)
    throw DivergentIntegral("partition integrals at gamma*=" + format_double(gamma) + " did not converge",
                            bracket_zero(gamma, spec.m()));
  const double alpha = spec.alpha();
  const double divergence = (std::log(zd.value) - alpha * std::log(zs.value)) / (alpha - 1.0);
  const double mean = classical_mean(query(spec, spec.constraint_exponent(), gamma));
  return TsallisSolution{spec,
                         gamma,
                         zs.value,
                         zd.value,
                         divergence,
                         tsallis_density(ref, nu, gamma, spec.m(), zs.value),
                         mean,
                         interior,
                         route,
                         zs.domain};
}

TsallisSolution solve_direct(const ProblemSpec& spec, double gamma_lo, double gamma_hi, std::size_t n) {
  DualScan scan = scan_dual(spec, gamma_lo, gamma_hi, n);
  IntervalMaximum best = scan.maxima[scan.selected];
  // m at the reference mean: the polished root lands within rounding of zero
  if (best.interior && std::abs(best.gamma) <= 1e-12 * (gamma_hi - gamma_lo) && scan.intervals.contains(0.0))
    best.gamma = 0.0;
  TsallisSolution sol = build_solution(spec, best.gamma, best.interior, Route::direct);
  if (std::abs(sol.achieved_mean - spec.m()) > kMeanTol) {
    scan = scan_dual(spec, gamma_lo, gamma_hi, 4 * n);
    best = scan.maxima[scan.selected];
    sol = build_solution(spec, best.gamma, best.interior, Route::direct);
  }
  if (std::abs(sol.achieved_mean - spec.m()) > kMeanTol)
    throw ConstraintUnattainable("mean " + format_double(spec.m()) + " not attained in gamma range [" +
                                     format_double(gamma_lo) + ", " + format_double(gamma_hi) +
                                     "]; closest achieved mean " + format_double(sol.achieved_mean),
                                 sol.achieved_mean);
  return sol;
}

}  // namespace

std::string to_string(Kind k) { return k == Kind::C ? "C" : "G"; }

Kind parse_kind(const std::string& s) {
  if (s == "C" || s == "c") return Kind::C;
  if (s == "G" || s == "g") return Kind::G;
  throw InvalidParameter("kind", "expected C or G, got '" + s + "'");
}

std::string to_string(Route r) { return r == Route::direct ? "direct" : "dual-classical"; }

ProblemSpec::ProblemSpec(Kind kind, double alpha, double m, ReferenceDistribution ref)
    : kind_(kind), alpha_(alpha), xi_(0.0), m_(m), ref_(std::move(ref)) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) throw InvalidParameter("alpha", "must be > 0");
  if (alpha == 1.0) throw InvalidParameter("alpha", "alpha = 1 is the Shannon limit and is excluded");
  if (!std::isfinite(m)) throw InvalidParameter("m", "must be finite");
  xi_ = 1.0 / (alpha - 1.0);
}

bool dual_defined(double gamma, const ProblemSpec& spec) {
  if (!std::isfinite(gamma)) return false;
  return domain_status(query(spec, spec.density_exponent(), gamma)) == DomainStatus::ok &&
         domain_status(query(spec, spec.escort_exponent(), gamma)) == DomainStatus::ok;
}

double dual_c(double gamma, const ProblemSpec& spec) {
  if (spec.kind() != Kind::C) throw PreconditionViolation("dual_c requires a kind C problem");
  return dual_value(gamma, spec);
}

double dual_g(double gamma, const ProblemSpec& spec) {
  if (spec.kind() != Kind::G) throw PreconditionViolation("dual_g requires a kind G problem");
  return dual_value(gamma, spec);
}

double dual_value(double gamma, const ProblemSpec& spec) {
  if (gamma == 0.0) return 0.0;
  const double z = objective(spec, gamma);
  if (!std::isfinite(z) || !(z > 0.0)) return kNegInf;
  return -std::log(z);
}

double mu_tilde(double gamma, const ProblemSpec& spec) {
  if (spec.kind() != Kind::C) throw PreconditionViolation("mu_tilde requires a kind C problem");
  return -(spec.xi() + 1.0) * (1.0 - gamma * spec.m());
}

bool is_unimodal(const DualScan& scan, std::size_t k, double tol) {
  const Interval iv = scan.intervals[k];
  int direction = 0;  // +1 rising, -1 falling
  int changes = 0;
  double last = kNaN;
  for (std::size_t i = 0; i < scan.gammas.size(); ++i) {
    if (!iv.contains(scan.gammas[i]) || !std::isfinite(scan.values[i])) continue;
    if (std::isnan(last)) {
      last = scan.values[i];
      continue;
    }
    const double d = scan.values[i] - last;
    if (std::abs(d) <= tol) continue;
    const int dir = d > 0.0 ? 1 : -1;
    if (direction != 0 && dir != direction) ++changes;
    direction = dir;
    last = scan.values[i];
  }
  // A maximum allows exactly one change from rising to falling.
  return changes <= 1;
}

DualScan scan_dual(const ProblemSpec& spec, double gamma_lo, double gamma_hi, std::size_t n) {
  if (!(gamma_lo < gamma_hi)) throw InvalidParameter("gamma_range", "requires gamma_lo < gamma_hi");
  if (n < 64) throw InvalidParameter("n", "scan grid needs at least 64 points");

  DualScan scan;
  scan.gammas.resize(n);
  scan.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    const double g = i + 1 == n ? gamma_hi : gamma_lo + t * (gamma_hi - gamma_lo);
    scan.gammas[i] = g;
    scan.values[i] = dual_value(g, spec);
  }

  auto defined = [&](double g) { return std::isfinite(dual_value(g, spec)); };
  std::vector<Interval> found;
  for (std::size_t i = 0; i < n;) {
    if (!std::isfinite(scan.values[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && std::isfinite(scan.values[j + 1])) ++j;
    double lo = scan.gammas[i];
    double hi = scan.gammas[j];
    if (i > 0) lo = refine_boundary(defined, lo, scan.gammas[i - 1], kBoundaryTol);
    if (j + 1 < n) hi = refine_boundary(defined, hi, scan.gammas[j + 1], kBoundaryTol);
    found.push_back({lo, hi});
    i = j + 1;
  }
  if (found.empty())
    throw NoDefinedPoint("alternate dual undefined on the whole grid [" + format_double(gamma_lo) + ", " +
                         format_double(gamma_hi) + "]");

  scan.intervals = IntervalSet(found);
  for (const auto& iv : scan.intervals.intervals()) scan.maxima.push_back(maximize_on(spec, iv.lo, iv.hi));
  scan.selected = 0;
  for (std::size_t k = 1; k < scan.maxima.size(); ++k)
    if (scan.maxima[k].value < scan.maxima[scan.selected].value) scan.selected = k;
  return scan;
}

std::pair<double, double> default_gamma_range(const ReferenceDistribution& ref) {
  double r = 0.0;
  switch (ref.family()) {
    case Family::uniform:
    case Family::tabulated:
      r = 50.0 / (ref.support().upper() - ref.support().lower());
      break;
    case Family::exponential:
      r = 50.0 * ref.params()[0];
      break;
    case Family::gaussian:
      r = 50.0 / ref.params()[1];
      break;
    case Family::gamma:
      r = 50.0 / ref.stddev();
      break;
  }
  return {-r, r};
}

Density tsallis_density(const ReferenceDistribution& ref, double nu, double gamma, double xbar, double z) {
  const IntervalSet domain = gamma_domain(gamma, xbar, ref);
  std::vector<double> breaks(ref.breakpoints().begin(), ref.breakpoints().end());
  std::vector<double> singular(ref.singular_points().begin(), ref.singular_points().end());
  const double zero = bracket_zero(gamma, xbar);
  if (std::isfinite(zero) && domain.contains(zero)) {
    breaks.push_back(zero);
    if (nu < 0.0 || nu != std::floor(nu)) singular.push_back(zero);
  }
  const double inv_z = 1.0 / z;
  auto f = [ref, nu, gamma, xbar, inv_z](double x) {
    const double qx = ref(x);
    if (qx == 0.0) return 0.0;
    const double b = gamma * (x - xbar) + 1.0;
    if (b < 0.0) return 0.0;
    return qx * std::pow(b, nu) * inv_z;
  };
  return Density(f, domain, breaks, singular);
}

TsallisSolution solve(const ProblemSpec& spec, double gamma_lo, double gamma_hi, std::size_t n) {
  if (spec.kind() == Kind::G && spec.alpha() > 1.0) {
    try {
      return solve_direct(spec, gamma_lo, gamma_hi, n);
    } catch (const Error&) {
      // The generalized problem at alpha is the classical one at 1/alpha; its
      // solution is the escort of the classical solution with index 1/alpha.
      const double a1 = 1.0 / spec.alpha();
      const TsallisSolution c = solve_direct(ProblemSpec(Kind::C, a1, spec.m(), spec.ref()), gamma_lo, gamma_hi, n);
      TsallisSolution g = build_solution(spec, c.gamma_star, c.interior, Route::dual_classical);
      g.density = escort(c.density, spec.ref().density(), a1);
      return g;
    }
  }
  return solve_direct(spec, gamma_lo, gamma_hi, n);
}

TsallisSolution solve(const ProblemSpec& spec) {
  const auto [lo, hi] = default_gamma_range(spec.ref());
  return solve(spec, lo, hi);
}

ThetaSolution solve_theta(double theta, const Density& p1, const Density& q, double alpha_lo, double alpha_hi) {
  if (!std::isfinite(theta)) throw InvalidParameter("theta", "must be finite");
  if (!(alpha_lo < alpha_hi)) throw InvalidParameter("alpha_lo", "requires alpha_lo < alpha_hi");
  if (alpha_lo < 0.0 || alpha_hi > 1.0) throw InvalidParameter("alpha_hi", "alpha range must lie in [0, 1]");
  const DensityPair pair = make_density_pair(p1, q);
  if (!(pair.common_domain.total_length() > 0.0))
    throw PreconditionViolation("p1 and q have no common support");

  auto log_norm = [&](double a) { return std::log(power_overlap(pair, a)); };
  auto g = [&](double a) { return a * theta - log_norm(a); };
  // g'(a) = theta - E_{escort(a)}[log(p1/q)]
  auto dg = [&](double a) { return theta - escort_log_ratio_mean(pair, a); };

  const Bracket br = golden_section([&](double a) { return -g(a); }, alpha_lo, alpha_hi, 1e-6);
  double alpha = 0.5 * (br.lo + br.hi);
  bool boundary = false;
  const double d_lo = dg(alpha_lo);
  const double d_hi = dg(alpha_hi);
  // g is concave; a derivative within rounding of zero at an end counts as that end
  constexpr double kSlopeTol = 1e-10;
  if (d_hi >= -kSlopeTol) {
    alpha = alpha_hi;
    boundary = true;
  } else if (d_lo <= kSlopeTol) {
    alpha = alpha_lo;
    boundary = true;
  } else {
    // polish inside the golden-section bracket when it brackets the stationary point
    const double a = std::max(alpha_lo, br.lo - 1e-6), b = std::min(alpha_hi, br.hi + 1e-6);
    const double da = dg(a), db = dg(b);
    alpha = (da > 0.0 && db < 0.0) ? root_in(dg, a, b, da, db, 1e-14) : root_in(dg, alpha_lo, alpha_hi, d_lo, d_hi, 1e-14);
  }
  ThetaSolution out{alpha, escort(p1, q, alpha), g(alpha), boundary, {}};
  if (boundary)
    out.warning = "optimum at alpha=" + format_double(alpha) +
                  " (range boundary): theta is not attainable in the interior";
  return out;
}

std::vector<SweepRow> sweep_dual(const ProblemSpec& spec, std::span<const double> gammas) {
  std::vector<SweepRow> rows;
  rows.reserve(gammas.size());
  const double nu = spec.density_exponent();
  for (double g : gammas) {
    SweepRow row{g, dual_value(g, spec), kNaN, kNaN, kNaN, false};
    row.defined = std::isfinite(row.dual);
    if (row.defined) {
      const PartitionQuery q = query(spec, nu, g);
      row.z = partition_value(q).value;
      row.mean_classical = classical_mean(q);
      row.mean_generalized = generalized_mean(q, spec.alpha());
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::pair<std::size_t, std::size_t>> non_injective_pairs(const ProblemSpec& spec,
                                                                       std::span<const SweepRow> rows, double tol) {
  auto mean = [&](const SweepRow& r) { return spec.kind() == Kind::C ? r.mean_classical : r.mean_generalized; };
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].defined && std::isfinite(mean(rows[i]))) idx.push_back(i);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return mean(rows[a]) < mean(rows[b]) || (mean(rows[a]) == mean(rows[b]) && a < b);
  });
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size() && mean(rows[idx[b]]) - mean(rows[idx[a]]) <= tol; ++b)
      out.emplace_back(std::min(idx[a], idx[b]), std::max(idx[a], idx[b]));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace renyi
