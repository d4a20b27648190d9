#include <doctest.h>

#include <cmath>
#include <random>

#include "renyi/density.hpp"
#include "renyi/errors.hpp"
#include "renyi/reference.hpp"
#include "support.hpp"

using namespace renyi;

namespace {

std::vector<ReferenceDistribution> builtins() {
  return {make_builtin(Family::uniform, {0.0, 1.0}), make_builtin(Family::uniform, {-2.0, 3.0}),
          make_builtin(Family::exponential, {1.0}),  make_builtin(Family::exponential, {2.5}),
          make_builtin(Family::gaussian, {0.0, 1.0}), make_builtin(Family::gaussian, {1.0, 0.3}),
          make_builtin(Family::gamma, {1.2, 1.0}),   make_builtin(Family::gamma, {3.0, 2.0})};
}

}  // namespace

TEST_CASE("uniform(0,1) has density one on its support") {
  const auto u = make_builtin(Family::uniform, {0.0, 1.0});
  CHECK(u(0.25) == 1.0);
  CHECK(u(-0.1) == 0.0);
  CHECK(u(1.1) == 0.0);
  CHECK(total_mass(u.density()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.mean() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(u.variance() == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
}

TEST_CASE("exponential(1) is e^-x on the half line") {
  const auto e = make_builtin(Family::exponential, {1.0});
  CHECK(e(0.7) == doctest::Approx(std::exp(-0.7)).epsilon(1e-14));
  CHECK(e(-0.1) == 0.0);
  CHECK(e.support().lower() == 0.0);
  CHECK(total_mass(e.density()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.truncation_mass() < 1e-30);
  CHECK(e.mean() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("gaussian truncation is recorded in the label") {
  const auto g = make_builtin(Family::gaussian, {1.0, 2.0});
  CHECK(g.support().lower() == doctest::Approx(-23.0));
  CHECK(g.support().upper() == doctest::Approx(25.0));
  CHECK(g.truncation_mass() < 1e-30);
  CHECK(g.label().find("tail") != std::string::npos);
  CHECK(g.stddev() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("gamma moments") {
  const auto g = make_builtin(Family::gamma, {1.2, 1.0});
  CHECK(g.mean() == doctest::Approx(1.2).epsilon(1e-9));
  CHECK(g.variance() == doctest::Approx(1.2).epsilon(1e-8));
  const auto g3 = make_builtin(Family::gamma, {3.0, 2.0});
  CHECK(g3.mean() == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("invalid parameters name the culprit") {
  try {
    make_builtin(Family::uniform, {1.0, 1.0});
    FAIL("expected an error");
  } catch (const InvalidParameter& e) {
    CHECK(e.parameter() == "hi");
  }
  CHECK_THROWS_AS(make_builtin(Family::exponential, {-1.0}), InvalidParameter);
  CHECK_THROWS_AS(make_builtin(Family::gaussian, {0.0, 0.0}), InvalidParameter);
  CHECK_THROWS_AS(make_builtin(Family::gamma, {0.0, 1.0}), InvalidParameter);
  CHECK_THROWS_AS(make_builtin(Family::gamma, {1.0}), InvalidParameter);
  CHECK_THROWS_AS(parse_family("cauchy"), InvalidParameter);
}

TEST_CASE("tabulated flat rows become 2/3 on [0,1.5]") {
  const std::vector<TabulatedRow> rows{{0.0, 1.0}, {0.5, 1.0}, {1.0, 1.0}, {1.5, 1.0}};
  const auto t = load_tabulated(rows);
  CHECK(t(0.3) == doctest::Approx(1.0 / 1.5).epsilon(1e-14));
  CHECK(t(1.49) == doctest::Approx(1.0 / 1.5).epsilon(1e-14));
  CHECK(t.scale_factor() == doctest::Approx(1.0 / 1.5));
  CHECK(t.support() == IntervalSet::single(0.0, 1.5));
}

TEST_CASE("tabulated triangle is normalized to area one") {
  const std::vector<TabulatedRow> rows{{0.0, 0.0}, {0.5, 1.0}, {1.0, 2.0}, {1.5, 1.0}, {2.0, 0.0}};
  const auto t = load_tabulated(rows);
  CHECK(t.scale_factor() == doctest::Approx(0.5));
  CHECK(t(1.0) == doctest::Approx(1.0));
  CHECK(t(0.25) == doctest::Approx(0.25));
  CHECK(total_mass(t.density()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.mean() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tabulated rows are validated") {
  CHECK_THROWS_AS(load_tabulated(std::vector<TabulatedRow>{{0, 1}, {1, 1}, {1, 1}, {2, 1}}), InvalidParameter);
  CHECK_THROWS_AS(load_tabulated(std::vector<TabulatedRow>{{0, 1}, {1, -1}, {2, 1}, {3, 1}}), InvalidParameter);
  CHECK_THROWS_AS(load_tabulated(std::vector<TabulatedRow>{{0, 1}, {1, 1}, {2, 1}}), InvalidParameter);
  CHECK_THROWS_AS(load_tabulated(std::vector<TabulatedRow>{{0, 0}, {1, 0}, {2, 0}, {3, 0}}), InvalidParameter);
}

TEST_CASE("every built-in integrates to one and matches an independent Simpson sum") {
  for (const auto& r : builtins()) {
    CAPTURE(r.label());
    CHECK(std::abs(total_mass(r.density()) - 1.0) <= 1e-8);
    if (r.family() == Family::gamma && r.params()[0] < 2.0) continue;  // singular slope at 0
    const double s = testing_support::simpson([&](double x) { return r(x); }, r.support().lower(),
                                              r.support().upper(), 400000);
    CHECK(std::abs(s - 1.0) <= 1e-8);
  }
}

TEST_CASE("randomized probes: nonnegative inside, zero outside") {
  std::mt19937_64 rng(11);
  for (const auto& r : builtins()) {
    CAPTURE(r.label());
    const double lo = r.support().lower(), hi = r.support().upper();
    std::uniform_real_distribution<double> inside(lo, hi);
    std::uniform_real_distribution<double> offset(1e-9, 10.0);
    for (int i = 0; i < 10000; ++i) {
      REQUIRE(r(inside(rng)) >= 0.0);
      REQUIRE(r(lo - offset(rng)) == 0.0);
      REQUIRE(r(hi + offset(rng)) == 0.0);
    }
  }
}
