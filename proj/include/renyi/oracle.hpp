#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "renyi/reference.hpp"
#include "renyi/solver.hpp"

namespace renyi {

/// Discretized divergence minimization on the probability simplex.
struct GridProblem {
  std::vector<double> nodes;      // ascending
  std::vector<double> q_weights;  // sums to one
  double alpha;
  double m;
  Kind kind;
};

/// Splits [lo, hi] (default: the support hull) into n equal cells. Weights are
/// the cell masses of Q, nodes the Q-weighted cell means.
GridProblem make_grid_problem(const ReferenceDistribution& ref, std::size_t n, double alpha, double m, Kind kind,
                              double lo, double hi);
GridProblem make_grid_problem(const ReferenceDistribution& ref, std::size_t n, double alpha, double m, Kind kind);

struct OracleOptions {
  std::size_t max_iterations = 100000;
  std::size_t restarts = 8;
  std::uint64_t seed = 0x5eed2024;
  std::size_t threads = 1;
  /// Stop once no log-weight moves by more than this in one step.
  double step_tolerance = 1e-13;
};

struct OracleResult {
  std::vector<double> weights;
  double divergence;
  double residual;                          // constraint residual of `weights`
  std::vector<double> restart_divergences;  // one per restart
  std::size_t iterations;                   // of the best restart
};

/// (1/(alpha-1)) log sum p^alpha q^(1-alpha).
double discrete_divergence(std::span<const double> p, std::span<const double> q, double alpha);

/// Constrained mean: sum x p (C) or the escort mean (G).
double discrete_constraint(const GridProblem& gp, std::span<const double> p);

/// Minimizes the discrete Rényi divergence over the simplex subject to the mean
/// constraint with multiplicative (entropic mirror) updates, each followed by a
/// tilt that restores the constraint. Throws InfeasibleConstraint or NonConvergence.
OracleResult oracle_solve(const GridProblem& gp, const OracleOptions& opts = {});

}  // namespace renyi
