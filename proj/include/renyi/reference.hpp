#pragma once

#include <span>
#include <string>
#include <vector>

#include "renyi/density.hpp"
#include "renyi/interval_set.hpp"

namespace renyi {

enum class Family { uniform, exponential, gaussian, gamma, tabulated };

std::string to_string(Family f);
/// Parses "uniform", "exponential", "gaussian" or "gamma". Throws InvalidParameter.
Family parse_family(const std::string& name);

struct TabulatedRow {
  double x;
  double q;
};

/// Reference distribution Q: a normalized density on a bounded support plus
/// metadata. Infinite analytic supports are truncated where the omitted tail
/// mass is below 1e-30 and the remainder renormalized.
class ReferenceDistribution {
 public:
  double operator()(double x) const { return density_(x); }

  const Density& density() const { return density_; }
  const IntervalSet& support() const { return density_.support(); }
  std::span<const double> breakpoints() const { return density_.breakpoints(); }
  std::span<const double> singular_points() const { return density_.singular_points(); }

  Family family() const { return family_; }
  std::span<const double> params() const { return params_; }
  const std::string& label() const { return label_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double stddev() const;
  /// Tail mass removed by truncation (0 for bounded families).
  double truncation_mass() const { return truncation_mass_; }
  /// Factor applied to tabulated values so they integrate to one (1 otherwise).
  double scale_factor() const { return scale_factor_; }

 private:
  friend ReferenceDistribution make_builtin(Family, std::span<const double>);
  friend ReferenceDistribution load_tabulated(std::span<const TabulatedRow>);

  ReferenceDistribution(Density density, Family family, std::vector<double> params, std::string label,
                        double truncation_mass, double scale_factor);

  Density density_;
  Family family_;
  std::vector<double> params_;
  std::string label_;
  double truncation_mass_;
  double scale_factor_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

/// uniform(lo, hi), exponential(rate), gaussian(mu, sigma), gamma(shape, rate).
ReferenceDistribution make_builtin(Family family, std::span<const double> params);
inline ReferenceDistribution make_builtin(Family family, std::initializer_list<double> params) {
  return make_builtin(family, std::span<const double>(params.begin(), params.size()));
}

/// Piecewise-linear density through the rows, rescaled so the trapezoid integral is one.
ReferenceDistribution load_tabulated(std::span<const TabulatedRow> rows);

}  // namespace renyi
