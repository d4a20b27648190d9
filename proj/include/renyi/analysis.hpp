#pragma once

#include <cstddef>

#include "renyi/density.hpp"
#include "renyi/interval_set.hpp"

namespace renyi {

struct TsallisSolution;

/// Two densities compared on the intersection of their supports.
struct DensityPair {
  Density p;
  Density q;
  IntervalSet common_domain;
};

/// Checks both densities integrate to 1 within 1e-8 (PreconditionViolation otherwise).
DensityPair make_density_pair(const Density& p, const Density& q);

/// Integral of p^alpha q^(1-alpha) over the common domain. Pointwise values
/// below 1e-300 in either density contribute zero.
double power_overlap(const DensityPair& pair, double alpha);

/// D_alpha(P||Q) = log(power_overlap) / (alpha - 1). Throws DivergentIntegral on
/// support violations (no overlap for alpha < 1, supp P not in supp Q for alpha > 1).
double renyi_divergence(const DensityPair& pair, double alpha);

/// (power_overlap - 1) / (alpha - 1), the Tsallis analogue of the Rényi divergence.
double tsallis_divergence(const DensityPair& pair, double alpha);

/// Integral of p log(p/q). Throws DivergentIntegral unless supp P is in supp Q.
double kl_divergence(const DensityPair& pair);

/// (integral of p^alpha over domain - 1) / (1 - alpha).
double tsallis_entropy(const Density& p, double alpha, const IntervalSet& domain);

/// p^alpha q^(1-alpha) normalized on the common domain. Throws Error on a zero normalizer.
Density escort(const Density& p, const Density& q, double alpha);

/// E[log(p/q)] under escort(p, q, alpha); the alpha-derivative of log power_overlap.
double escort_log_ratio_mean(const DensityPair& pair, double alpha);

/// Largest |a(x) - b(x)| over `points` equispaced abscissae spanning `where`.
double sup_distance(const Density& a, const Density& b, const IntervalSet& where, std::size_t points = 512);

struct DualityReport {
  double gamma_gap;                // |gamma*_C - gamma*_G|
  double escort_gap_g;             // sup |P_G - escort(P_C, Q, alpha1)|
  double escort_gap_c;             // sup |P_C - escort(P_G, Q, alpha2)|
  double divergence_gap;           // |D_{1/alpha1}(escort(P_C)||Q) - D_{alpha1}(P_C||Q)|
  double solution_divergence_gap;  // |D_{alpha2}(P_G||Q) - D_{alpha1}(P_C||Q)|

  double max_entry() const;
};

/// Compares a classical solution at alpha1 with a generalized one at alpha2 = 1/alpha1.
/// Throws IndexMismatch when the indices, mean values or references disagree.
DualityReport check_duality(const TsallisSolution& sol_c, const TsallisSolution& sol_g);

}  // namespace renyi
