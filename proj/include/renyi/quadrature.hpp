#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace renyi::quad {

using Integrand = std::function<double(double)>;

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  std::size_t max_panels = 4000;
  /// Cap on geometric panels laid down toward a singular endpoint.
  std::size_t max_geometric_panels = 200;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = true;
};

/// Marks endpoints where the integrand may be singular (power-law blow-up or a
/// non-smooth power such as t^0.4).
struct SingularEnds {
  bool left = false;
  bool right = false;
};

/// One 15-point Gauss-Kronrod panel with the QUADPACK error estimate.
Result gauss_kronrod15(const Integrand& f, double a, double b);

/// Adaptive Gauss-Kronrod quadrature on a finite interval [a, b].
///
/// The interval is first split at `breakpoints`. Segments that touch a singular
/// end are covered by panels whose widths shrink by a factor 4 toward the
/// endpoint; once successive panel contributions decay geometrically the
/// remainder is summed as a geometric series. Contributions that stop decaying
/// mark the integral as divergent (`converged == false`).
Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints = {},
                 SingularEnds singular = {}, const Options& opts = {});

}  // namespace renyi::quad
