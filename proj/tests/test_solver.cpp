#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "renyi/analysis.hpp"
#include "renyi/density.hpp"
#include "renyi/errors.hpp"
#include "renyi/solver.hpp"
#include "support.hpp"

using namespace renyi;
using testing_support::simpson;

namespace {

const ReferenceDistribution& unit() {
  static const auto u = make_builtin(Family::uniform, {0.0, 1.0});
  return u;
}

// mean of x under p^a q^(1-a), on [lo, hi], by Simpson
double escort_mean(const Density& p, const ReferenceDistribution& q, double a, double lo, double hi) {
  auto w = [&](double x) {
    const double pv = p(x), qv = q(x);
    return pv > 0.0 && qv > 0.0 ? std::pow(pv, a) * std::pow(qv, 1.0 - a) : 0.0;
  };
  return simpson([&](double x) { return x * w(x); }, lo, hi) / simpson(w, lo, hi);
}

}  // namespace

TEST_CASE("problem spec derives xi with alpha*xi = xi+1") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 6.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng);
    if (a == 1.0) continue;
    const ProblemSpec s(Kind::C, a, 0.5, unit());
    CHECK(std::abs(a * s.xi() - (s.xi() + 1.0)) <= 1e-9 * std::max(1.0, std::abs(s.xi())));
    CHECK(s.density_exponent() == s.xi());
    CHECK(ProblemSpec(Kind::G, a, 0.5, unit()).density_exponent() == -s.xi());
  }
  CHECK_THROWS_AS(ProblemSpec(Kind::C, 1.0, 0.5, unit()), InvalidParameter);
  CHECK_THROWS_AS(ProblemSpec(Kind::C, 0.0, 0.5, unit()), InvalidParameter);
  CHECK_THROWS_AS(ProblemSpec(Kind::C, -1.0, 0.5, unit()), InvalidParameter);
  CHECK_THROWS_AS(ProblemSpec(Kind::G, 0.5, std::nan(""), unit()), InvalidParameter);
  CHECK(parse_kind("G") == Kind::G);
  CHECK_THROWS_AS(parse_kind("X"), InvalidParameter);
}

TEST_CASE("dual C values") {
  const ProblemSpec s(Kind::C, 0.5, 0.5, unit());
  CHECK(dual_c(0.0, s) == 0.0);
  const double expected = -std::log(std::log(1.3 / 0.7) / 0.6);
  CHECK(std::abs(dual_c(0.6, s) - expected) <= 1e-9);
  const double simpson_value = -std::log(simpson([](double x) { return 1.0 / (0.6 * (x - 0.5) + 1.0); }, 0.0, 1.0));
  CHECK(std::abs(dual_c(0.6, s) - simpson_value) <= 1e-9);
  // m off the support: domain empty for gamma = 1
  const ProblemSpec far(Kind::C, 0.5, 3.0, unit());
  CHECK(dual_c(1.0, far) == -std::numeric_limits<double>::infinity());
  CHECK_FALSE(dual_defined(1.0, far));
  CHECK_THROWS_AS(dual_c(0.1, ProblemSpec(Kind::G, 0.5, 0.5, unit())), PreconditionViolation);
}

TEST_CASE("mu tilde") {
  CHECK(mu_tilde(0.0, ProblemSpec(Kind::C, 0.5, 0.3, unit())) == doctest::Approx(1.0));
  CHECK(std::abs(mu_tilde(1.0 / 0.4, ProblemSpec(Kind::C, 0.5, 0.4, unit()))) <= 1e-15);
  const ProblemSpec zero_m(Kind::C, 2.0, 0.0, unit());
  for (double g : {-1.0, 0.3, 5.0}) CHECK(mu_tilde(g, zero_m) == doctest::Approx(-(zero_m.xi() + 1.0)));
}

TEST_CASE("dual G values") {
  const ProblemSpec s(Kind::G, 0.5, 0.5, unit());
  CHECK(dual_g(0.0, s) == 0.0);
  CHECK(std::abs(dual_g(0.6, s) - (-std::log(1.0 + 0.36 / 12.0))) <= 1e-9);
  const ProblemSpec far(Kind::G, 0.5, 3.0, unit());
  CHECK(dual_g(1.0, far) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(dual_g(0.1, ProblemSpec(Kind::C, 0.5, 0.5, unit())), PreconditionViolation);
}

TEST_CASE("scan at the reference mean selects gamma = 0") {
  const ProblemSpec s(Kind::C, 0.5, 0.5, unit());
  const DualScan scan = scan_dual(s, -5.0, 5.0, 256);
  REQUIRE(scan.intervals.size() == 1);
  CHECK(scan.intervals.contains(0.0));
  CHECK(std::abs(scan.maxima[scan.selected].gamma) <= 1e-10);
  CHECK(is_unimodal(scan, 0));
  // defined exactly on (-2, 2): beyond, the bracket vanishes inside the support and 1/B diverges
  CHECK(scan.intervals.lower() == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(scan.intervals.upper() == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("shifting the mean right needs a negative gamma when alpha < 1") {
  // density [gamma(x-m)+1]^xi Q with xi = -2 grows with x only for gamma < 0
  const ProblemSpec s(Kind::C, 0.5, 0.7, unit());
  const DualScan scan = scan_dual(s, -5.0, 5.0, 512);
  const auto& best = scan.maxima[scan.selected];
  CHECK(best.gamma < 0.0);
  CHECK(std::isfinite(best.value));
  CHECK(best.interior);
  for (std::size_t k = 0; k < scan.maxima.size(); ++k) CHECK(is_unimodal(scan, k));
}

TEST_CASE("scan errors") {
  const ProblemSpec s(Kind::C, 0.5, 0.5, unit());
  CHECK_THROWS_AS(scan_dual(s, 3.0, 5.0, 128), NoDefinedPoint);
  CHECK_THROWS_AS(scan_dual(s, 1.0, -1.0, 128), InvalidParameter);
  CHECK_THROWS_AS(scan_dual(s, -1.0, 1.0, 10), InvalidParameter);
}

TEST_CASE("solution at the reference mean is Q itself") {
  const auto sol = solve(ProblemSpec(Kind::C, 0.5, 0.5, unit()));
  CHECK(sol.gamma_star == 0.0);
  CHECK(std::abs(sol.divergence) <= 1e-12);
  for (double x : {0.01, 0.3, 0.77, 0.99}) CHECK(sol.density(x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kind C at m = 0.7 is normalized and meets the mean") {
  const auto sol = solve(ProblemSpec(Kind::C, 0.5, 0.7, unit()));
  const double lo = sol.domain.lower(), hi = sol.domain.upper();
  const double mass = simpson([&](double x) { return sol.density(x); }, lo, hi);
  const double mean = simpson([&](double x) { return x * sol.density(x); }, lo, hi);
  CHECK(std::abs(mass - 1.0) <= 1e-8);
  CHECK(std::abs(mean - 0.7) <= 1e-6);
  CHECK(std::abs(sol.divergence + std::log(sol.Z_dual)) <= 1e-8);
  CHECK(std::abs(sol.Z_solution - sol.Z_dual) <= 1e-7 * sol.Z_dual);
  CHECK(sol.route == Route::direct);
}

TEST_CASE("kind G at m = 0.7 meets the generalized mean") {
  const auto sol = solve(ProblemSpec(Kind::G, 0.5, 0.7, unit()));
  const double lo = sol.domain.lower(), hi = sol.domain.upper();
  CHECK(std::abs(simpson([&](double x) { return sol.density(x); }, lo, hi) - 1.0) <= 1e-8);
  CHECK(std::abs(escort_mean(sol.density, unit(), 0.5, lo, hi) - 0.7) <= 1e-6);
  CHECK(std::abs(sol.achieved_mean - 0.7) <= 1e-6);
  CHECK(std::abs(sol.divergence + std::log(sol.Z_dual)) <= 1e-8);
  // independent divergence from the density itself
  const auto pair = make_density_pair(sol.density, unit().density());
  CHECK(std::abs(renyi_divergence(pair, 0.5) - sol.divergence) <= 1e-8);
}

TEST_CASE("postconditions across kinds, indices and references") {
  const auto ex = make_builtin(Family::exponential, {1.0});
  const auto ga = make_builtin(Family::gaussian, {0.0, 1.0});
  struct Case {
    const ReferenceDistribution* ref;
    Kind kind;
    double alpha, m;
  };
  const std::vector<Case> cases{{&unit(), Kind::C, 2.0, 0.6}, {&unit(), Kind::C, 3.0, 0.3},
                                {&unit(), Kind::G, 1.5, 0.6}, {&unit(), Kind::G, 0.3, 0.2},
                                {&ex, Kind::C, 0.5, 0.7},     {&ex, Kind::G, 0.8, 1.3},
                                {&ga, Kind::C, 2.0, 0.4},     {&ga, Kind::G, 0.5, -0.4}};
  for (const auto& c : cases) {
    CAPTURE(to_string(c.kind));
    CAPTURE(c.alpha);
    CAPTURE(c.m);
    const auto sol = solve(ProblemSpec(c.kind, c.alpha, c.m, *c.ref));
    CHECK(std::abs(total_mass(sol.density) - 1.0) <= 1e-8);
    CHECK(std::abs(sol.achieved_mean - c.m) <= 1e-6);
    CHECK(std::abs(sol.divergence + std::log(sol.Z_dual)) <= 1e-8);
    CHECK(std::abs(sol.Z_solution - sol.Z_dual) <= 1e-7 * sol.Z_dual);
    CHECK(sol.divergence >= 0.0);
  }
}

TEST_CASE("dual G is stationary at its interior optimum") {
  for (double m : {0.3, 0.6, 0.7}) {
    const ProblemSpec s(Kind::G, 0.5, m, unit());
    const auto sol = solve(s);
    REQUIRE(sol.interior);
    const double h = 1e-5;
    const double d = (dual_g(sol.gamma_star + h, s) - dual_g(sol.gamma_star - h, s)) / (2.0 * h);
    CHECK(std::abs(d) <= 1e-5);
  }
}

TEST_CASE("gamma* is monotone in m") {
  // decreasing: larger m needs a more negative gamma for alpha < 1
  double previous = std::numeric_limits<double>::infinity();
  for (double m : {0.55, 0.6, 0.65, 0.7}) {
    const double g = solve(ProblemSpec(Kind::C, 0.5, m, unit())).gamma_star;
    CHECK(g < previous);
    previous = g;
  }
}

TEST_CASE("scan resolution does not move the optimum") {
  for (Kind k : {Kind::C, Kind::G}) {
    const ProblemSpec s(k, 0.5, 0.62, unit());
    const auto a = scan_dual(s, -50.0, 50.0, 512);
    const auto b = scan_dual(s, -50.0, 50.0, 1024);
    CHECK(std::abs(a.maxima[a.selected].gamma - b.maxima[b.selected].gamma) <= 1e-8);
  }
}

TEST_CASE("unreachable mean reports the closest achieved mean") {
  try {
    solve(ProblemSpec(Kind::C, 0.5, 0.7, unit()), -0.1, 0.1);
    FAIL("expected an error");
  } catch (const ConstraintUnattainable& e) {
    CHECK(e.closest_mean() > 0.5);
    CHECK(e.closest_mean() < 0.7);
  }
}

TEST_CASE("kind G with alpha > 1 reports the route taken") {
  for (double a : {1.5, 2.0, 4.0}) {
    const auto sol = solve(ProblemSpec(Kind::G, a, 0.4, unit()));
    CHECK(std::abs(sol.achieved_mean - 0.4) <= 1e-6);
    CHECK((sol.route == Route::direct || sol.route == Route::dual_classical));
    CHECK(std::abs(total_mass(sol.density) - 1.0) <= 1e-8);
  }
}

TEST_CASE("solve_theta special cases") {
  const std::vector<TabulatedRow> rows{{0.0, 0.0}, {0.25, 1.0}, {0.5, 2.0}, {0.75, 1.0}, {1.0, 0.0}};
  const auto tri = load_tabulated(rows);

  SUBCASE("identical references") {
    const auto t = solve_theta(0.0, unit().density(), unit().density());
    CHECK(std::abs(t.value) <= 1e-12);
    for (double x : {0.1, 0.5, 0.9}) CHECK(t.escort(x) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("theta at the Q end gives alpha* = 0") {
    // theta = D(Q||Q) - D(Q||P1) = -KL(Q||P1)
    const double theta = -kl_divergence(make_density_pair(tri.density(), unit().density()));
    const auto t = solve_theta(theta, unit().density(), tri.density());
    CHECK(t.alpha_star == 0.0);
    CHECK(t.at_boundary);
    CHECK_FALSE(t.warning.empty());
    for (double x : {0.1, 0.4, 0.8}) CHECK(t.escort(x) == doctest::Approx(tri(x)).epsilon(1e-10));
  }
  SUBCASE("theta = KL(P1||Q) gives alpha* = 1") {
    const double theta = kl_divergence(make_density_pair(unit().density(), tri.density()));
    const auto t = solve_theta(theta, unit().density(), tri.density());
    CHECK(std::abs(t.alpha_star - 1.0) <= 1e-6);
    for (double x : {0.1, 0.4, 0.8}) CHECK(t.escort(x) == doctest::Approx(1.0).epsilon(1e-5));
  }
  SUBCASE("interior theta meets its constraint") {
    const double theta = 0.5 * kl_divergence(make_density_pair(unit().density(), tri.density())) -
                         0.5 * kl_divergence(make_density_pair(tri.density(), unit().density()));
    const auto t = solve_theta(theta, unit().density(), tri.density());
    CHECK_FALSE(t.at_boundary);
    const auto pair = make_density_pair(unit().density(), tri.density());
    CHECK(std::abs(escort_log_ratio_mean(pair, t.alpha_star) - theta) <= 1e-6);
  }
  CHECK_THROWS_AS(solve_theta(0.1, unit().density(), tri.density(), 0.0, 1.5), InvalidParameter);
}

TEST_CASE("sweep: monotone mean on the central interval") {
  const ProblemSpec s(Kind::C, 0.5, 0.5, unit());
  std::vector<double> gammas;
  for (int i = 0; i <= 120; ++i) gammas.push_back(-3.0 + 0.05 * i);
  const auto rows = sweep_dual(s, gammas);
  REQUIRE(rows.size() == gammas.size());
  double prev = std::numeric_limits<double>::infinity();
  std::size_t defined = 0;
  for (const auto& r : rows) {
    if (std::abs(std::abs(r.gamma) - 2.0) > 1e-6) CHECK(r.defined == (std::abs(r.gamma) < 2.0));
    if (!r.defined) {
      CHECK(r.dual == -std::numeric_limits<double>::infinity());
      continue;
    }
    ++defined;
    // the classical mean under B^xi decreases with gamma since xi < 0
    CHECK(r.mean_classical < prev);
    prev = r.mean_classical;
  }
  CHECK(defined > 50);
  CHECK(non_injective_pairs(s, rows).empty());
}
