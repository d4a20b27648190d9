#include "renyi/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace renyi::quad {
namespace {

// Kronrod abscissae on [-1, 1] (positive half); odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool fixed;  // geometric-series tail: never subdivided
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

}  // namespace

Result gauss_kronrod15(const Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);

  std::array<double, 7> f1{}, f2{};
  const double fc = f(centre);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  double res_abs = std::abs(res_k);
  for (int j = 0; j < 3; ++j) {
    const int jj = 2 * j + 1;
    const double dx = half * kXgk[jj];
    const double v1 = f(centre - dx);
    const double v2 = f(centre + dx);
    f1[jj] = v1;
    f2[jj] = v2;
    res_g += kWg[j] * (v1 + v2);
    res_k += kWgk[jj] * (v1 + v2);
    res_abs += kWgk[jj] * (std::abs(v1) + std::abs(v2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jj = 2 * j;
    const double dx = half * kXgk[jj];
    const double v1 = f(centre - dx);
    const double v2 = f(centre + dx);
    f1[jj] = v1;
    f2[jj] = v2;
    res_k += kWgk[jj] * (v1 + v2);
    res_abs += kWgk[jj] * (std::abs(v1) + std::abs(v2));
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) res_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  Result r;
  r.value = res_k * half;
  res_abs *= abs_half;
  res_asc *= abs_half;
  double err = std::abs((res_k - res_g) * half);
  if (res_asc != 0.0 && err != 0.0) err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * res_abs, err);
  r.abs_error = err;
  r.converged = std::isfinite(r.value) && std::isfinite(err);
  return r;
}

namespace {

struct Geometric {
  std::vector<Panel> panels;
  bool divergent = false;
};

// Panels [e + s*w/4^{k+1}, e + s*w/4^k] approaching endpoint e from direction s.
Geometric geometric_panels(const Integrand& f, double endpoint, double width, double direction,
                           const Options& opts) {
  Geometric out;
  double prev = -1.0;
  double prev_ratio = -1.0;
  int growing = 0;
  double accumulated = 0.0;
  double outer = width;
  for (std::size_t k = 0; k < opts.max_geometric_panels; ++k) {
    const double inner = outer / 4.0;
    const double p = endpoint + direction * inner;
    const double q = endpoint + direction * outer;
    if (p == q || inner == 0.0) break;
    Result r = direction > 0 ? gauss_kronrod15(f, p, q) : gauss_kronrod15(f, q, p);
    if (!r.converged) {
      out.divergent = true;
      return out;
    }
    out.panels.push_back({std::min(p, q), std::max(p, q), r.value, r.abs_error, false});
    accumulated += r.value;
    outer = inner;

    const double c = std::abs(r.value);
    if (k >= 1) {
      if (c == 0.0 && prev == 0.0) return out;
      if (prev > 0.0) {
        const double ratio = c / prev;
        if (ratio >= 1.0) {
          if (++growing >= 3) {
            out.divergent = true;
            return out;
          }
        } else {
          growing = 0;
          const double tail = r.value * ratio / (1.0 - ratio);
          const double tol = 0.1 * std::max(opts.abs_tol, opts.rel_tol * std::abs(accumulated));
          const bool stable = prev_ratio > 0.0 && std::abs(ratio - prev_ratio) <= 1e-10 * ratio && k >= 8;
          if (std::abs(tail) <= tol || stable) {
            // sensitivity of v r / (1 - r) to the drift in r
            const double tail_err =
                stable ? std::abs(r.value) * std::abs(ratio - prev_ratio) / ((1.0 - ratio) * (1.0 - ratio)) +
                             8.0 * kEps * std::abs(tail)
                       : std::abs(tail);
            out.panels.push_back({std::min(endpoint, p), std::max(endpoint, p), tail, tail_err, true});
            return out;
          }
        }
        prev_ratio = ratio;
      }
    }
    prev = c;
  }
  // Ran out of panels: the remainder is accepted only if it is already negligible.
  if (prev > 0.0 && out.panels.size() >= 2) {
    const double c0 = std::abs(out.panels[out.panels.size() - 2].value);
    const double ratio = c0 > 0.0 ? prev / c0 : 1.0;
    if (ratio < 1.0) {
      const double tail = out.panels.back().value * ratio / (1.0 - ratio);
      const double p = endpoint + direction * outer;
      out.panels.push_back({std::min(endpoint, p), std::max(endpoint, p), tail, std::abs(tail), true});
      return out;
    }
    out.divergent = true;
  }
  return out;
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                 SingularEnds singular, const Options& opts) {
  Result out;
  if (!(b > a)) return out;

  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
  std::vector<Panel> fixed;
  auto add_regular = [&](double lo, double hi) {
    Result r = gauss_kronrod15(f, lo, hi);
    if (!r.converged) return false;
    queue.push({lo, hi, r.value, r.abs_error, false});
    return true;
  };
  auto add_geometric = [&](double endpoint, double width, double direction) {
    Geometric g = geometric_panels(f, endpoint, width, direction, opts);
    if (g.divergent) return false;
    for (auto& p : g.panels) {
      if (p.fixed) {
        fixed.push_back(p);
      } else {
        queue.push(p);
      }
    }
    return true;
  };

  const std::size_t segments = cuts.size() - 1;
  for (std::size_t s = 0; s < segments; ++s) {
    const double lo = cuts[s];
    const double hi = cuts[s + 1];
    const bool sing_lo = singular.left && s == 0;
    const bool sing_hi = singular.right && s + 1 == segments;
    bool ok = true;
    if (sing_lo && sing_hi) {
      const double mid = 0.5 * (lo + hi);
      ok = add_geometric(lo, mid - lo, 1.0) && add_geometric(hi, hi - mid, -1.0);
    } else if (sing_lo) {
      ok = add_geometric(lo, hi - lo, 1.0);
    } else if (sing_hi) {
      ok = add_geometric(hi, hi - lo, -1.0);
    } else {
      ok = add_regular(lo, hi);
    }
    if (!ok) {
      out.converged = false;
      out.value = std::numeric_limits<double>::infinity();
      out.abs_error = std::numeric_limits<double>::infinity();
      return out;
    }
  }

  auto totals = [&](double& value, double& error) {
    value = 0.0;
    error = 0.0;
    for (const auto& p : fixed) {
      value += p.value;
      error += p.error;
    }
    auto copy = queue;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().error;
      copy.pop();
    }
  };

  double value = 0.0, error = 0.0;
  totals(value, error);
  std::size_t panels = queue.size() + fixed.size();
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(value)) && panels < opts.max_panels &&
         !queue.empty()) {
    Panel worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // cannot split further
    queue.pop();
    Result left = gauss_kronrod15(f, worst.a, mid);
    Result right = gauss_kronrod15(f, mid, worst.b);
    if (!left.converged || !right.converged) {
      out.converged = false;
      out.value = std::numeric_limits<double>::infinity();
      out.abs_error = std::numeric_limits<double>::infinity();
      return out;
    }
    value += left.value + right.value - worst.value;
    error += left.abs_error + right.abs_error - worst.error;
    queue.push({worst.a, mid, left.value, left.abs_error, false});
    queue.push({mid, worst.b, right.value, right.abs_error, false});
    ++panels;
    if (panels % 64 == 0) totals(value, error);  // refresh against drift
  }
  totals(value, error);
  out.value = value;
  out.abs_error = error;
  out.converged = std::isfinite(value) && error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
  return out;
}

}  // namespace renyi::quad
