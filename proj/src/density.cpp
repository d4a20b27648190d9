#include "renyi/density.hpp"

#include <algorithm>
#include <cmath>

#include "renyi/errors.hpp"

namespace renyi {

Density::Density(Function f, IntervalSet support, std::vector<double> breakpoints,
                 std::vector<double> singular_points) {
  std::sort(breakpoints.begin(), breakpoints.end());
  std::sort(singular_points.begin(), singular_points.end());
  impl_ = std::make_shared<const Impl>(
      Impl{std::move(f), std::move(support), std::move(breakpoints), std::move(singular_points)});
}

double Density::operator()(double x) const {
  if (!impl_->support.contains(x)) return 0.0;
  return impl_->f(x);
}

quad::Result integrate_over(const quad::Integrand& g, const IntervalSet& domain,
                            std::span<const double> breakpoints,
                            std::span<const double> singular_points, const quad::Options& opts) {
  quad::Result total;
  for (const auto& iv : domain.intervals()) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw PreconditionViolation("integration domain must be bounded, got " + domain.to_string());
    if (!(iv.hi > iv.lo)) continue;

    std::vector<double> cuts{iv.lo};
    for (double s : singular_points)
      if (s > iv.lo && s < iv.hi) cuts.push_back(s);
    cuts.push_back(iv.hi);
    auto is_singular = [&](double x) {
      return std::find(singular_points.begin(), singular_points.end(), x) != singular_points.end();
    };
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const quad::SingularEnds ends{is_singular(cuts[k]), is_singular(cuts[k + 1])};
      const quad::Result r = quad::integrate(g, cuts[k], cuts[k + 1], breakpoints, ends, opts);
      total.value += r.value;
      total.abs_error += r.abs_error;
      total.converged = total.converged && r.converged;
    }
  }
  return total;
}

double total_mass(const Density& p, const quad::Options& opts) {
  return integrate_over([&](double x) { return p(x); }, p.support(), p.breakpoints(),
                        p.singular_points(), opts)
      .value;
}

std::vector<double> merge_points(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace renyi
