#include "renyi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "renyi/errors.hpp"
#include "renyi/parallel.hpp"

namespace renyi {
namespace {

constexpr double kResidualTol = 1e-6;
constexpr double kLogFloor = -690.0;    // log weights never drop below this
constexpr double kMaxMove = 2.0;        // cap on one step in log weight
constexpr double kNegligible = -36.8;   // log(1e-16)
constexpr std::size_t kStallWindow = 100;

void validate(const GridProblem& gp) {
  const std::size_t n = gp.nodes.size();
  if (n < 200) throw InvalidParameter("nodes", "grid needs at least 200 nodes");
  if (gp.q_weights.size() != n) throw InvalidParameter("q_weights", "size differs from nodes");
  if (!(gp.alpha > 0.0) || gp.alpha == 1.0) throw InvalidParameter("alpha", "must be > 0 and != 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (gp.q_weights[i] < 0.0) throw InvalidParameter("q_weights", "negative weight");
    if (i > 0 && !(gp.nodes[i] > gp.nodes[i - 1])) throw InvalidParameter("nodes", "must be strictly increasing");
    sum += gp.q_weights[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidParameter("q_weights", "must sum to one");
  if (!(gp.m > gp.nodes.front() && gp.m < gp.nodes.back())) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "m=%.17g is outside the node range (%.17g, %.17g)", gp.m, gp.nodes.front(),
                  gp.nodes.back());
    throw InfeasibleConstraint(buf);
  }
}

double log_sum_exp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Active nodes only (q > 0); u holds log p.
struct Restart {
  const std::vector<double>& x;
  const std::vector<double>& logq;
  double alpha;
  double m;
  Kind kind;

  std::vector<double> weights(const std::vector<double>& u) const {
    std::vector<double> p(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) p[i] = std::exp(u[i]);
    return p;
  }

  // log sum p^alpha q^(1-alpha)
  double log_overlap(const std::vector<double>& u) const {
    std::vector<double> t(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) t[i] = alpha * u[i] + (1.0 - alpha) * logq[i];
    return log_sum_exp(t);
  }

  double divergence(const std::vector<double>& u) const { return log_overlap(u) / (alpha - 1.0); }

  double constraint(const std::vector<double>& u) const {
    const double k = kind == Kind::C ? 1.0 : alpha;
    std::vector<double> t(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) t[i] = k * u[i] + (1.0 - k) * logq[i];
    const double lse = log_sum_exp(t);
    double mean = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) mean += x[i] * std::exp(t[i] - lse);
    return mean;
  }

  void normalize(std::vector<double>& u) const {
    const double lse = log_sum_exp(u);
    for (double& v : u) v -= lse;
  }

  // Tilts u along x - m until the constrained mean equals m.
  // h(tau) = sum a_i exp(k tau (x_i - m)) (x_i - m) is increasing in tau.
  void restore_constraint(std::vector<double>& u) const {
    const std::size_t n = u.size();
    const double k = kind == Kind::C ? 1.0 : alpha;
    std::vector<double> base(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      base[i] = k * u[i] + (1.0 - k) * logq[i];
      // Plain exponential tilt for either kind. The tangent projection already
      // handles first order, this only removes the curvature drift.
      d[i] = x[i] - m;
    }
    double dscale = 0.0;
    for (double v : d) dscale = std::max(dscale, std::abs(v));
    for (double& v : d) v /= dscale;

    std::vector<double> t(n);
    // Returns h scaled by exp(-max exponent) and its derivative under the same scaling.
    auto eval = [&](double tau, double& h, double& dh) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        t[i] = base[i] + k * tau * d[i];
        mx = std::max(mx, t[i]);
      }
      h = 0.0;
      dh = 0.0;
      double norm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = std::exp(t[i] - mx);
        norm += w;
        h += w * (x[i] - m);
        dh += w * k * d[i] * (x[i] - m);
      }
      h /= norm;
      dh /= norm;
    };

    double h = 0.0, dh = 0.0;
    eval(0.0, h, dh);
    double lo = 0.0, hi = 0.0, hlo = h, hhi = h;
    double step = 1.0;
    while (hlo > 0.0) {
      hi = lo;
      hhi = hlo;
      lo -= step;
      step *= 2.0;
      eval(lo, hlo, dh);
    }
    step = 1.0;
    while (hhi < 0.0) {
      lo = hi;
      hlo = hhi;
      hi += step;
      step *= 2.0;
      eval(hi, hhi, dh);
    }
    // Newton inside the bracket, bisection when Newton leaves it.
    double tau = hlo == 0.0 ? lo : (hhi == 0.0 ? hi : 0.5 * (lo + hi));
    if (lo <= 0.0 && 0.0 <= hi) tau = 0.0;
    for (int it = 0; it < 200; ++it) {
      eval(tau, h, dh);
      if (h == 0.0) break;
      if (h < 0.0) {
        lo = tau;
      } else {
        hi = tau;
      }
      double next = dh > 0.0 ? tau - h / dh : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - tau) <= 1e-17 * std::max(1.0, std::abs(tau)) || hi - lo <= 1e-16 * std::max(1.0, std::abs(tau))) {
        tau = next;
        break;
      }
      tau = next;
    }
    for (std::size_t i = 0; i < n; ++i) u[i] += tau * d[i];
    normalize(u);
  }

  // Removes from g the components that would change the total mass or the
  // constrained mean, measured in the metric diag(p).
  void project_tangent(const std::vector<double>& u, std::vector<double>& g) const {
    const std::size_t n = u.size();
    const double k = kind == Kind::C ? 1.0 : alpha;
    std::vector<double> p(n), w(n);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = std::exp(u[i]);
      w[i] = std::exp(k * u[i] + (1.0 - k) * logq[i]);
      wsum += w[i];
    }
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += w[i] / wsum * x[i];
    double pg = 0.0, gg = 0.0, gv = 0.0;
    for (std::size_t i = 0; i < n; ++i) pg += p[i] * g[i];
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      // dc/du_i = k w_i (x_i - c); v is that gradient divided by p_i
      const double grad = k * w[i] / wsum * (x[i] - c);
      v[i] = k * std::exp((k - 1.0) * (u[i] - logq[i])) / wsum * (x[i] - c);
      gg += grad * g[i];
      gv += grad * v[i];
    }
    const double b = gv > 0.0 ? gg / gv : 0.0;
    for (std::size_t i = 0; i < n; ++i) g[i] -= pg + b * v[i];
  }

  struct Outcome {
    std::vector<double> u;
    double divergence;
    double residual;
    std::size_t iterations;
  };

  Outcome run(std::vector<double> u, const OracleOptions& opts) const {
    const std::size_t n = u.size();
    normalize(u);
    restore_constraint(u);
    double value = divergence(u);
    // Mass-weighted curvature of D in log coordinates is exactly alpha, so the
    // base step is 1/alpha. Nodes whose weight is heading to zero see a much
    // larger local curvature; their per-step change is capped instead.
    const double base_step = 1.0 / alpha;
    double scale = 1.0;
    std::vector<double> g(n), trial(n);
    double checkpoint = value;
    std::size_t it = 0;
    for (; it < opts.max_iterations; ++it) {
      const double log_f = log_overlap(u);
      for (std::size_t i = 0; i < n; ++i) {
        // d D / d p_i = alpha/(alpha-1) r_i^(alpha-1) / F
        g[i] = alpha / (alpha - 1.0) * std::exp((alpha - 1.0) * (u[i] - logq[i]) - log_f);
      }
      project_tangent(u, g);
      double moved = 0.0;
      bool accepted = false;
      for (int attempt = 0; attempt < 80; ++attempt) {
        const double step = scale * base_step;
        for (std::size_t i = 0; i < n; ++i)
          trial[i] = std::max(kLogFloor, u[i] - std::clamp(step * g[i], -kMaxMove, kMaxMove));
        normalize(trial);
        restore_constraint(trial);
        const double v = divergence(trial);
        if (v <= value + 1e-15 * std::max(1.0, std::abs(value))) {
          moved = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            if (std::max(u[i], trial[i]) > kNegligible) moved = std::max(moved, std::abs(trial[i] - u[i]));
          u.swap(trial);
          value = v;
          accepted = true;
          break;
        }
        scale *= 0.5;  // step decay
      }
      if (!accepted || moved <= opts.step_tolerance) break;
      if ((it + 1) % kStallWindow == 0) {
        // stalled: the objective has stopped moving at rounding level
        if (checkpoint - value <= 1e-14 * std::max(1.0, std::abs(value))) break;
        checkpoint = value;
      }
      scale = std::min(1e6, scale * 1.5);
    }
    const double residual = std::abs(constraint(u) - m);
    return {std::move(u), value, residual, it};
  }
};

}  // namespace

GridProblem make_grid_problem(const ReferenceDistribution& ref, std::size_t n, double alpha, double m, Kind kind,
                              double lo, double hi) {
  if (n < 200) throw InvalidParameter("n", "grid needs at least 200 nodes");
  if (!(lo < hi)) throw InvalidParameter("hi", "grid bounds require lo < hi");
  GridProblem gp{{}, {}, alpha, m, kind};
  gp.nodes.reserve(n);
  gp.q_weights.reserve(n);
  const double width = (hi - lo) / static_cast<double>(n);
  std::vector<double> nodes, weights;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = lo + width * static_cast<double>(i);
    const double b = i + 1 == n ? hi : a + width;
    const IntervalSet cell = IntervalSet::single(a, b).intersect(ref.support());
    const double mass = integrate_over([&](double x) { return ref(x); }, cell, ref.breakpoints(),
                                       ref.singular_points())
                            .value;
    const double first = integrate_over([&](double x) { return x * ref(x); }, cell, ref.breakpoints(),
                                        ref.singular_points())
                             .value;
    if (mass > 0.0) {
      gp.nodes.push_back(std::clamp(first / mass, a, b));
      gp.q_weights.push_back(mass);
    }
  }
  const double total = std::accumulate(gp.q_weights.begin(), gp.q_weights.end(), 0.0);
  for (double& w : gp.q_weights) w /= total;
  return gp;
}

GridProblem make_grid_problem(const ReferenceDistribution& ref, std::size_t n, double alpha, double m, Kind kind) {
  return make_grid_problem(ref, n, alpha, m, kind, ref.support().lower(), ref.support().upper());
}

double discrete_divergence(std::span<const double> p, std::span<const double> q, double alpha) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0 && q[i] > 0.0) s += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  return std::log(s) / (alpha - 1.0);
}

double discrete_constraint(const GridProblem& gp, std::span<const double> p) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0) || !(gp.q_weights[i] > 0.0)) continue;
    const double w =
        gp.kind == Kind::C ? p[i] : std::pow(p[i], gp.alpha) * std::pow(gp.q_weights[i], 1.0 - gp.alpha);
    num += w * gp.nodes[i];
    den += w;
  }
  return num / den;
}

OracleResult oracle_solve(const GridProblem& gp, const OracleOptions& opts) {
  validate(gp);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < gp.nodes.size(); ++i)
    if (gp.q_weights[i] > 0.0) active.push_back(i);
  std::vector<double> x, logq;
  for (std::size_t i : active) {
    x.push_back(gp.nodes[i]);
    logq.push_back(std::log(gp.q_weights[i]));
  }
  if (!(gp.m > x.front() && gp.m < x.back()))
    throw InfeasibleConstraint("m lies outside the nodes that carry reference mass");

  const Restart engine{x, logq, gp.alpha, gp.m, gp.kind};
  const std::size_t restarts = std::max<std::size_t>(1, opts.restarts);
  std::vector<Restart::Outcome> outcomes(restarts);
  parallel_for(restarts, opts.threads, [&](std::size_t k) {
    std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ULL * (k + 1));
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    std::vector<double> u(logq);
    for (double& v : u) v += jitter(rng);
    outcomes[k] = engine.run(std::move(u), opts);
  });

  std::size_t best = restarts;
  for (std::size_t k = 0; k < restarts; ++k) {
    if (outcomes[k].residual > kResidualTol) continue;
    if (best == restarts || outcomes[k].divergence < outcomes[best].divergence) best = k;
  }
  if (best == restarts) {
    double worst = 0.0;
    for (const auto& o : outcomes) worst = std::max(worst, o.residual);
    throw NonConvergence("no restart reached a feasible point", worst);
  }

  OracleResult out;
  out.weights.assign(gp.nodes.size(), 0.0);
  const auto p = engine.weights(outcomes[best].u);
  for (std::size_t j = 0; j < active.size(); ++j) out.weights[active[j]] = p[j];
  out.divergence = outcomes[best].divergence;
  out.residual = outcomes[best].residual;
  out.iterations = outcomes[best].iterations;
  for (const auto& o : outcomes) out.restart_divergences.push_back(o.divergence);
  return out;
}

}  // namespace renyi
