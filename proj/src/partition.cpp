#include "renyi/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "renyi/errors.hpp"

namespace renyi {
namespace {

constexpr double kDivergenceDensityFloor = 1e-12;

enum class Weight { one, centered };

std::string describe(const PartitionQuery& q) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "nu=%.17g gamma=%.17g xbar=%.17g", q.nu, q.gamma, q.xbar);
  return buf;
}

void check_domain(const PartitionQuery& q, const IntervalSet& domain) {
  if (domain.empty() || !(domain.total_length() > 0.0))
    throw EmptyDomain("partition domain is empty (" + describe(q) + ")");
  if (q.nu <= -1.0 && q.gamma != 0.0) {
    const double zero = bracket_zero(q.gamma, q.xbar);
    if (domain.contains(zero) && q.ref(zero) > kDivergenceDensityFloor)
      throw DivergentIntegral("non-integrable bracket zero at x=" + std::to_string(zero) + " (" + describe(q) + ")",
                              zero);
  }
}

quad::Result integrate_weighted(const PartitionQuery& q, const IntervalSet& domain, Weight weight,
                                const quad::Options& opts) {
  const auto& ref = q.ref;
  const double gamma = q.gamma;
  const double xbar = q.xbar;
  const double nu = q.nu;
  const double zero = bracket_zero(gamma, xbar);
  const auto breaks = merge_points(ref.breakpoints(), ref.singular_points());

  quad::Result total;
  for (const auto& iv : domain.intervals()) {
    if (!(iv.hi > iv.lo)) continue;
    // distance from the bracket zero to the near end of the interval, when it is small
    double offset = -1.0;
    if (gamma != 0.0) {
      const double gap = gamma > 0.0 ? iv.lo - zero : zero - iv.hi;
      if (gap >= 0.0 && (gap == 0.0 || (nu < 0.0 && gap < 1e-2 * iv.length()))) offset = gap;
    }
    quad::Result r;
    if (offset >= 0.0) {
      // Work in t = distance from the bracket zero, where the bracket is exactly |gamma| t.
      const double s = gamma > 0.0 ? 1.0 : -1.0;
      const double length = iv.length();
      const double scale = std::abs(gamma);
      const double inv_gamma = 1.0 / gamma;
      std::vector<double> tb;
      bool far_singular = false;
      for (double b : breaks) {
        const double t = s * (b - zero);
        if (t > offset && t < offset + length) tb.push_back(t);
      }
      for (double b : ref.singular_points())
        if (b == (gamma > 0.0 ? iv.hi : iv.lo)) far_singular = true;
      auto f = [&](double t) {
        const double x = zero + s * t;
        const double qx = ref(x);
        if (qx == 0.0) return 0.0;
        const double v = qx * std::pow(scale * t, nu);
        return weight == Weight::one ? v : v * (s * t - inv_gamma);
      };
      if (offset > 0.0) {
        // graded cuts resolve the near-singular scale set by the offset
        for (double w = offset; offset + w < offset + length; w *= 2.0) tb.push_back(offset + w);
        std::sort(tb.begin(), tb.end());
      }
      r = quad::integrate(f, offset, offset + length, tb, {offset == 0.0, far_singular}, opts);
    } else {
      auto f = [&](double x) {
        const double qx = ref(x);
        if (qx == 0.0) return 0.0;
        const double d = x - xbar;
        const double b = gamma * d + 1.0;
        if (b <= 0.0) return 0.0;
        const double v = nu == 0.0 ? qx : qx * std::pow(b, nu);
        return weight == Weight::one ? v : v * d;
      };
      r = integrate_over(f, IntervalSet::single(iv.lo, iv.hi), ref.breakpoints(), ref.singular_points(), opts);
    }
    total.value += r.value;
    total.abs_error += r.abs_error;
    total.converged = total.converged && r.converged;
  }
  return total;
}

}  // namespace

double bracket_zero(double gamma, double xbar) {
  if (gamma == 0.0) return std::numeric_limits<double>::infinity();
  return xbar - 1.0 / gamma;
}

IntervalSet gamma_domain(double gamma, double xbar, const ReferenceDistribution& ref) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (gamma == 0.0) return ref.support();
  const double zero = bracket_zero(gamma, xbar);
  const IntervalSet half = gamma > 0.0 ? IntervalSet::single(zero, inf) : IntervalSet::single(-inf, zero);
  return ref.support().intersect(half);
}

DomainStatus domain_status(const PartitionQuery& q) {
  const IntervalSet domain = gamma_domain(q.gamma, q.xbar, q.ref);
  try {
    check_domain(q, domain);
  } catch (const EmptyDomain&) {
    return DomainStatus::empty;
  } catch (const DivergentIntegral&) {
    return DomainStatus::divergent;
  }
  return DomainStatus::ok;
}

quad::Options partition_tolerances() {
  quad::Options o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-13;
  o.max_panels = 4000;
  return o;
}

PartitionResult partition_value(const PartitionQuery& q, const quad::Options& opts) {
  PartitionResult out;
  out.domain = gamma_domain(q.gamma, q.xbar, q.ref);
  check_domain(q, out.domain);
  const quad::Result r = integrate_weighted(q, out.domain, Weight::one, opts);
  out.value = r.value;
  out.abs_error_estimate = r.abs_error;
  // the quadrature targets are tighter than needed here; accept its error estimate instead
  out.converged = std::isfinite(r.value) && std::isfinite(r.abs_error) && r.value > 0.0 &&
                  r.abs_error <= 1e-9 * std::max(1.0, r.value);
  return out;
}

double centered_moment(const PartitionQuery& q, const quad::Options& opts) {
  const IntervalSet domain = gamma_domain(q.gamma, q.xbar, q.ref);
  check_domain(q, domain);
  return integrate_weighted(q, domain, Weight::centered, opts).value;
}

double classical_mean(const PartitionQuery& q, const quad::Options& opts) {
  const PartitionResult z = partition_value(q, opts);
  if (!z.converged) throw DivergentIntegral("partition integral did not converge (" + describe(q) + ")",
                                            bracket_zero(q.gamma, q.xbar));
  return q.xbar + centered_moment(q, opts) / z.value;
}

double generalized_mean(const PartitionQuery& q, double alpha, const quad::Options& opts) {
  return classical_mean(PartitionQuery{q.nu * alpha, q.gamma, q.xbar, q.ref}, opts);
}

}  // namespace renyi
