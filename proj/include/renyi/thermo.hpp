#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "renyi/solver.hpp"

namespace renyi {

/// S = log Z_{xi+1}(gamma*, m) for kind C, log Z_{-xi}(gamma*, m) for kind G.
double entropy_of_solution(const TsallisSolution& sol);

/// lambda = -(xi+1) gamma* for kind C, xi gamma* for kind G.
double lambda_of_solution(const TsallisSolution& sol);

struct ThermoReport {
  std::vector<double> ms;
  std::vector<double> lambdas;
  std::vector<double> xbars;      // achieved means
  std::vector<double> entropies;
  std::vector<double> massieu;    // S - lambda xbar
  std::vector<bool> interior;
  double residual_euler = 0.0;     // max |dS/dlambda - lambda dxbar/dlambda|
  double residual_dSdx = 0.0;      // max |dS/dxbar - lambda|
  double residual_dphidlam = 0.0;  // max |dphi/dlambda + xbar|
  double residual_dphidx = 0.0;    // max |dphi/dxbar + xbar dlambda/dxbar|
  double conjugacy_gap = 0.0;      // max |S + divergence|
  double tolerance = 0.0;          // 1e-3 max(1, max |lambda|)
  bool passed = false;
  std::string note;

  double max_residual() const;
};

struct LegendreOptions {
  std::size_t threads = 1;
  double gamma_lo = 0.0;  // both zero: default_gamma_range
  double gamma_hi = 0.0;
};

/// Solves the family spec.with_m(m) for strictly increasing m (at least 5) and
/// checks the four conjugacy relations by central differences on interior nodes.
/// Members whose optimum is not interior are excluded from the residuals.
ThermoReport legendre_check(const ProblemSpec& spec, std::span<const double> ms, const LegendreOptions& opts = {});

/// `count` points centred on `centre` with spacing 0.025 times the reference stddev.
std::vector<double> legendre_family(const ReferenceDistribution& ref, double centre, std::size_t count = 9);

}  // namespace renyi
