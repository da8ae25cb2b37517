#include <cmath>

#include "doctest.h"
#include "multibump/error.hpp"
#include "multibump/groundstate.hpp"

using namespace multibump;

TEST_CASE("cubic soliton in one dimension") {
  const GroundStateProfile g = solve_ground_state(1, 3.0, 1e-10);
  CHECK(g.center_value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  double err = 0.0;
  for (double x = 0.0; x <= 10.0; x += 0.01) err = std::max(err, std::abs(g.value(x) - std::sqrt(2.0) / std::cosh(x)));
  CHECK(err < 1e-8);
  // √2 sech x e^x -> 2√2
  CHECK(g.tail_L0 == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-4));
  CHECK(g.tail_L1 == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-4));
  CHECK(g.ode_residual < 1e-10);
}

TEST_CASE("quadratic soliton in one dimension") {
  // U = (3/2) sech²(x/2): U(0) = 3/2, U e^x -> 6
  const GroundStateProfile g = solve_ground_state(1, 2.0, 1e-10);
  CHECK(g.center_value == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(g.value(3.0) == doctest::Approx(1.5 / std::pow(std::cosh(1.5), 2)).epsilon(1e-8));
  CHECK(g.tail_L0 == doctest::Approx(6.0).epsilon(1e-4));
}

TEST_CASE("energy is conserved for N = 1 and dissipated for N = 2") {
  const GroundStateProfile g1 = solve_ground_state(1, 3.0, 1e-10);
  double drift = 0.0;
  for (std::size_t j = 0; j < g1.radius.size() && g1.radius[j] < 15.0; ++j)
    drift = std::max(drift, std::abs(radial_energy(g1, j) - radial_energy(g1, 0)));
  CHECK(drift < 1e-8);

  const GroundStateProfile g2 = solve_ground_state(2, 3.0, 1e-9);
  bool nonincreasing = true;
  for (std::size_t j = 1; j < g2.radius.size() && g2.radius[j] < 15.0; ++j)
    nonincreasing = nonincreasing && radial_energy(g2, j) <= radial_energy(g2, j - 1) + 1e-12;
  CHECK(nonincreasing);
}

TEST_CASE("two-dimensional tail") {
  const GroundStateProfile g = solve_ground_state(2, 3.0, 1e-9);
  const TailFit fit = fit_tail_constants(g, 8.0, 12.0);
  CHECK(fit.spread_L0 < 0.02);
  CHECK(fit.spread_L1 < 0.05);
  CHECK(g.derivative(1.0) < 0.0);
  // Matched tail is continuous at the junction.
  const double r = g.tail_match_radius;
  CHECK(std::abs(g.value(r - 1e-9) - g.value(r + 1e-9)) < 1e-6 * g.value(r));
}

TEST_CASE("precondition violations") {
  CHECK_THROWS_AS(solve_ground_state(2, 1.5, 1e-9), ConfigError);
  CHECK_THROWS_AS(solve_ground_state(3, 6.0, 1e-9), ConfigError);
  CHECK_THROWS_AS(solve_ground_state(0, 3.0, 1e-9), ConfigError);
  CHECK_THROWS_AS(solve_ground_state(2, 3.0, 0.0), ConfigError);
  CHECK(exponent_is_admissible(2, 7.0));
  CHECK_FALSE(exponent_is_admissible(3, 5.0));
}
