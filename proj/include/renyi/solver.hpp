#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "renyi/density.hpp"
#include "renyi/interval_set.hpp"
#include "renyi/reference.hpp"

namespace renyi {

/// C: classical mean constraint E_P[X] = m. G: generalized (escort) mean constraint.
enum class Kind { C, G };

std::string to_string(Kind k);
Kind parse_kind(const std::string& s);

/// Rényi divergence minimization problem with entropic index alpha and mean value m.
class ProblemSpec {
 public:
  /// Throws InvalidParameter unless alpha > 0, alpha != 1 and m is finite.
  ProblemSpec(Kind kind, double alpha, double m, ReferenceDistribution ref);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  /// xi = 1 / (alpha - 1); alpha * xi == xi + 1.
  double xi() const { return xi_; }
  double m() const { return m_; }
  const ReferenceDistribution& ref() const { return ref_; }

  /// Exponent of the bracket in the solution density: xi (C) or -xi (G).
  double density_exponent() const { return kind_ == Kind::C ? xi_ : -xi_; }
  /// Exponent whose partition function is minimized by the alternate dual: xi+1 (C) or -xi (G).
  double objective_exponent() const { return kind_ == Kind::C ? xi_ + 1.0 : -xi_; }
  /// alpha times the density exponent: xi+1 (C) or -(xi+1) (G).
  double escort_exponent() const { return kind_ == Kind::C ? xi_ + 1.0 : -(xi_ + 1.0); }
  /// Exponent under which the mean is constrained to m: xi (C) or -(xi+1) (G).
  double constraint_exponent() const { return objective_exponent() - 1.0; }

  ProblemSpec with_m(double m) const { return ProblemSpec(kind_, alpha_, m, ref_); }

 private:
  Kind kind_;
  double alpha_;
  double xi_;
  double m_;
  ReferenceDistribution ref_;
};

/// True when both the density and escort partition functions are finite at gamma.
bool dual_defined(double gamma, const ProblemSpec& spec);

/// -log Z_{xi+1}(gamma, m), or -inf where undefined. Requires kind C.
double dual_c(double gamma, const ProblemSpec& spec);
/// -log Z_{-xi}(gamma, m), or -inf where undefined. Requires kind G.
double dual_g(double gamma, const ProblemSpec& spec);
/// Dispatches on spec.kind().
double dual_value(double gamma, const ProblemSpec& spec);

/// -(xi+1)(1 - gamma m), the multiplier that makes the alternate dual tight. Requires kind C.
double mu_tilde(double gamma, const ProblemSpec& spec);

struct IntervalMaximum {
  double gamma;
  double value;
  bool interior;  // stationary point, not a range or domain boundary
};

struct DualScan {
  std::vector<double> gammas;
  std::vector<double> values;  // -inf marks undefined points
  IntervalSet intervals;       // refined gamma-definition intervals
  std::vector<IntervalMaximum> maxima;
  std::size_t selected = 0;    // index of the smallest per-interval maximum
};

/// Grid values of interval `k` change direction at most once, ignoring changes below tol.
bool is_unimodal(const DualScan& scan, std::size_t k, double tol = 1e-9);

/// Tabulates the alternate dual on n >= 64 equispaced points of [gamma_lo, gamma_hi],
/// splits the axis into definition intervals, locates each interval maximum and
/// applies the min-of-maxima rule. Throws NoDefinedPoint if nothing is defined.
DualScan scan_dual(const ProblemSpec& spec, double gamma_lo, double gamma_hi, std::size_t n = 2048);

/// Default symmetric gamma search range: 50 / width for bounded families,
/// 50 / sigma for the gaussian and 50 / stddev for exponential and gamma.
std::pair<double, double> default_gamma_range(const ReferenceDistribution& ref);

enum class Route { direct, dual_classical };
std::string to_string(Route r);

struct TsallisSolution {
  ProblemSpec spec;
  double gamma_star;
  double Z_solution;      // partition of the density exponent at gamma*
  double Z_dual;          // partition of the escort exponent at gamma*
  double divergence;      // D_alpha(P || Q)
  Density density;
  double achieved_mean;   // classical mean (C) or generalized alpha-mean (G)
  bool interior;
  Route route;
  IntervalSet domain;
};

TsallisSolution solve(const ProblemSpec& spec, double gamma_lo, double gamma_hi, std::size_t n = 2048);
TsallisSolution solve(const ProblemSpec& spec);

/// Density proportional to [gamma (x - xbar) + 1]^nu Q(x), normalized by `z`.
Density tsallis_density(const ReferenceDistribution& ref, double nu, double gamma, double xbar, double z);

struct ThetaSolution {
  double alpha_star;
  Density escort;
  double value;       // alpha* theta - log integral of p1^alpha* q^(1 - alpha*)
  bool at_boundary;
  std::string warning;
};

/// Maximizes alpha theta - log int p1^alpha q^(1-alpha) over [alpha_lo, alpha_hi] within [0, 1].
ThetaSolution solve_theta(double theta, const Density& p1, const Density& q, double alpha_lo = 0.0,
                          double alpha_hi = 1.0);

struct SweepRow {
  double gamma;
  double dual;              // -inf when undefined
  double z;                 // partition of the density exponent
  double mean_classical;    // E_nu[X], nu the density exponent
  double mean_generalized;  // E_{alpha nu}[X]
  bool defined;
};

/// One row per gamma with xbar fixed at m. Undefined rows carry NaN statistics.
std::vector<SweepRow> sweep_dual(const ProblemSpec& spec, std::span<const double> gammas);

/// Index pairs (i < j) of defined rows whose constrained means agree within tol.
std::vector<std::pair<std::size_t, std::size_t>> non_injective_pairs(const ProblemSpec& spec,
                                                                       std::span<const SweepRow> rows,
                                                                       double tol = 1e-9);

}  // namespace renyi
