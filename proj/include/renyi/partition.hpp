#pragma once

#include "renyi/interval_set.hpp"
#include "renyi/quadrature.hpp"
#include "renyi/reference.hpp"

namespace renyi {

/// Z_nu(gamma, xbar) = integral over D of [gamma (x - xbar) + 1]^nu Q(x) dx,
/// with D = support(Q) intersected with {x : gamma (x - xbar) + 1 >= 0}.
struct PartitionQuery {
  double nu;
  double gamma;
  double xbar;
  const ReferenceDistribution& ref;
};

struct PartitionResult {
  double value = 0.0;
  IntervalSet domain;
  bool converged = false;
  double abs_error_estimate = 0.0;
};

enum class DomainStatus { ok, empty, divergent };

/// Zero of the bracket, xbar - 1/gamma; +-inf when gamma == 0.
double bracket_zero(double gamma, double xbar);

/// support(ref) intersected with the half-line where the bracket is nonnegative.
IntervalSet gamma_domain(double gamma, double xbar, const ReferenceDistribution& ref);

/// Classifies a query without integrating: empty (zero-length) domain, or a
/// non-integrable bracket zero (nu <= -1 with Q(zero) > 1e-12 on the closure of D).
DomainStatus domain_status(const PartitionQuery& q);

/// Default tolerances for partition integrals.
quad::Options partition_tolerances();

/// Throws EmptyDomain or DivergentIntegral (carrying the bracket zero). A
/// quadrature that fails to settle is reported with converged == false.
PartitionResult partition_value(const PartitionQuery& q, const quad::Options& opts = partition_tolerances());

/// Integral over D of (x - xbar) [gamma (x - xbar) + 1]^nu Q(x) dx.
double centered_moment(const PartitionQuery& q, const quad::Options& opts = partition_tolerances());

/// E_nu[X], the mean of the normalized P_nu.
double classical_mean(const PartitionQuery& q, const quad::Options& opts = partition_tolerances());

/// Generalized alpha-mean of P_nu, which is E_{alpha nu}[X].
double generalized_mean(const PartitionQuery& q, double alpha, const quad::Options& opts = partition_tolerances());

}  // namespace renyi
