#include "renyi/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <tuple>

#include "renyi/errors.hpp"
#include "renyi/parallel.hpp"

namespace renyi {

double entropy_of_solution(const TsallisSolution& sol) {
  return std::log(sol.spec.kind() == Kind::C ? sol.Z_dual : sol.Z_solution);
}

double lambda_of_solution(const TsallisSolution& sol) {
  const double xi = sol.spec.xi();
  return sol.spec.kind() == Kind::C ? -(xi + 1.0) * sol.gamma_star : xi * sol.gamma_star;
}

double ThermoReport::max_residual() const {
  return std::max({residual_euler, residual_dSdx, residual_dphidlam, residual_dphidx});
}

std::vector<double> legendre_family(const ReferenceDistribution& ref, double centre, std::size_t count) {
  const double h = 0.025 * ref.stddev();
  std::vector<double> ms(count);
  const double half = 0.5 * static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) ms[i] = centre + (static_cast<double>(i) - half) * h;
  return ms;
}

namespace {

// Weights w with f'(x[at]) ~ sum w_j f(x[first + j]) (derivative of the Lagrange basis).
std::vector<double> stencil_weights(const std::vector<double>& x, std::size_t first, std::size_t count, std::size_t at) {
  std::vector<double> w(count, 0.0);
  const double t = x[at];
  for (std::size_t j = 0; j < count; ++j) {
    const double xj = x[first + j];
    for (std::size_t k = 0; k < count; ++k) {
      if (k == j) continue;
      double term = 1.0 / (xj - x[first + k]);
      for (std::size_t l = 0; l < count; ++l) {
        if (l == j || l == k) continue;
        term *= (t - x[first + l]) / (xj - x[first + l]);
      }
      w[j] += term;
    }
  }
  return w;
}

}  // namespace

ThermoReport legendre_check(const ProblemSpec& spec, std::span<const double> ms, const LegendreOptions& opts) {
  if (ms.size() < 5) throw PreconditionViolation("legendre_check needs at least 5 family members");
  for (std::size_t i = 1; i < ms.size(); ++i)
    if (!(ms[i] > ms[i - 1])) throw PreconditionViolation("family m values must be strictly increasing");

  double lo = opts.gamma_lo, hi = opts.gamma_hi;
  if (lo == 0.0 && hi == 0.0) std::tie(lo, hi) = default_gamma_range(spec.ref());

  const std::size_t n = ms.size();
  std::vector<std::optional<TsallisSolution>> sols(n);
  std::vector<std::string> failures(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    try {
      sols[i] = solve(spec.with_m(ms[i]), lo, hi);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (!sols[i]) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "family member m=%.17g failed: ", ms[i]);
      throw Error(buf + failures[i]);
    }
  }

  ThermoReport r;
  r.ms.assign(ms.begin(), ms.end());
  double lam_max = 0.0;
  for (const auto& s : sols) {
    const double lam = lambda_of_solution(*s);
    const double S = entropy_of_solution(*s);
    r.lambdas.push_back(lam);
    r.xbars.push_back(s->achieved_mean);
    r.entropies.push_back(S);
    r.massieu.push_back(S - lam * s->achieved_mean);
    r.interior.push_back(s->interior);
    r.conjugacy_gap = std::max(r.conjugacy_gap, std::abs(S + s->divergence));
    lam_max = std::max(lam_max, std::abs(lam));
  }

  // Derivatives along the family parameter m from centred five-point stencils
  // on the nodes that have two neighbours each side, combined by the chain rule.
  constexpr std::size_t kStencil = 5;
  std::size_t used = 0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const std::size_t s = i - 2;
    bool ok = true;
    for (std::size_t j = s; j < s + kStencil; ++j) ok = ok && r.interior[j];
    if (!ok) continue;
    const auto w = stencil_weights(r.ms, s, kStencil, i);
    auto d = [&](const std::vector<double>& f) {
      double acc = 0.0;
      for (std::size_t j = 0; j < kStencil; ++j) acc += w[j] * f[s + j];
      return acc;
    };
    ++used;
    const double dS = d(r.entropies);
    const double dlam = d(r.lambdas);
    const double dx = d(r.xbars);
    const double dphi = d(r.massieu);
    const double lam = r.lambdas[i];
    const double xbar = r.xbars[i];
    r.residual_euler = std::max(r.residual_euler, std::abs(dS / dlam - lam * dx / dlam));
    r.residual_dSdx = std::max(r.residual_dSdx, std::abs(dS / dx - lam));
    r.residual_dphidlam = std::max(r.residual_dphidlam, std::abs(dphi / dlam + xbar));
    r.residual_dphidx = std::max(r.residual_dphidx, std::abs(dphi / dx + xbar * dlam / dx));
  }
  r.tolerance = 1e-3 * std::max(1.0, lam_max);
  r.passed = used > 0 && r.max_residual() <= r.tolerance;

  const bool positive = std::all_of(r.lambdas.begin(), r.lambdas.end(), [](double l) { return l > 0.0; });
  r.note = positive ? "lambda positive on the whole family"
                    : "lambda is not positive on the whole family; a temperature reading 1/lambda is not valid here";
  if (used + 4 < n) r.note += "; non-interior members excluded from residuals";
  return r;
}

}  // namespace renyi
