#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "renyi/interval_set.hpp"
#include "renyi/quadrature.hpp"

namespace renyi {

/// Immutable, cheaply copyable evaluable density on a declared support.
///
/// Evaluation returns 0 outside the support. `breakpoints` are abscissae where
/// the density is not smooth; `singular_points` are abscissae where it may
/// blow up or behave like a fractional power. Both are quadrature hints.
class Density {
 public:
  using Function = std::function<double(double)>;

  Density(Function f, IntervalSet support, std::vector<double> breakpoints = {},
          std::vector<double> singular_points = {});

  double operator()(double x) const;
  const IntervalSet& support() const { return impl_->support; }
  std::span<const double> breakpoints() const { return impl_->breakpoints; }
  std::span<const double> singular_points() const { return impl_->singular_points; }

 private:
  struct Impl {
    Function f;
    IntervalSet support;
    std::vector<double> breakpoints;
    std::vector<double> singular_points;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Integrates `g` over every interval of `domain` (all finite). Singular points
/// lying in an interval split it and are refined geometrically from both sides.
quad::Result integrate_over(const quad::Integrand& g, const IntervalSet& domain,
                            std::span<const double> breakpoints = {},
                            std::span<const double> singular_points = {},
                            const quad::Options& opts = {});

/// Integral of the density over its own support.
double total_mass(const Density& p, const quad::Options& opts = {});

/// Sorted union of two hint lists.
std::vector<double> merge_points(std::span<const double> a, std::span<const double> b);

}  // namespace renyi
