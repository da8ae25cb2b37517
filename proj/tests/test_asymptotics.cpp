#include <cmath>

#include "doctest.h"
#include "multibump/asymptotics.hpp"
#include "multibump/error.hpp"

using namespace multibump;

TEST_CASE("exponential shapes against the closed form") {
  for (double y0 : {4.0, 8.0, 12.0}) {
    const QuadratureResult q = interaction_quadrature(exponential_interaction(2.0, 1.0, y0));
    CHECK(q.value == doctest::Approx(exponential_interaction_exact(2.0, 1.0, y0)).epsilon(1e-8));
  }
  // a = 3, b = 1.5 as an independent case.
  const QuadratureResult q = interaction_quadrature(exponential_interaction(3.0, 1.5, 6.0));
  CHECK(q.value == doctest::Approx(exponential_interaction_exact(3.0, 1.5, 6.0)).epsilon(1e-8));
}

TEST_CASE("rescaled exponential interaction tends to 1/(a+b) + 1/(a-b)") {
  const InteractionLimit lim = interaction_limit(exponential_interaction(2.0, 1.0, 8.0), {8.0, 10.0, 12.0, 16.0}, 1.0);
  CHECK(lim.points.back().rescaled == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(lim.pointwise_limit == doctest::Approx(4.0 / 3.0).epsilon(1e-8));
  // L C0 = ∫ e^{-2|x|} = 1.
  CHECK(lim.stated_limit == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("soliton: pointwise limit is 4√2π, L C0 is 8√2") {
  const GroundStateProfile u = solve_ground_state(1, 3.0, 1e-10);
  const InteractionLimit lim = interaction_limit(profile_interaction(u, 2.0, 1.0, 8.0), {8.0, 12.0, 16.0}, u.tail_L0);
  CHECK(lim.C0 == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(lim.stated_limit == doctest::Approx(8.0 * std::sqrt(2.0)).epsilon(1e-4));
  CHECK(lim.pointwise_limit == doctest::Approx(4.0 * std::sqrt(2.0) * M_PI).epsilon(1e-4));
  CHECK(lim.points.back().rescaled == doctest::Approx(lim.pointwise_limit).epsilon(1e-3));
  CHECK(lim.monotone);
}

TEST_CASE("monotone in y0 and exact scaling in g") {
  const GroundStateProfile u = solve_ground_state(2, 3.0, 1e-9);
  double prev = INFINITY;
  for (double y0 : {6.0, 8.0, 10.0}) {
    const double v = interaction_quadrature(profile_interaction(u, 2.0, 1.0, y0)).value;
    CHECK(v < prev);
    prev = v;
  }
  InteractionSpec s = profile_interaction(u, 2.0, 1.0, 8.0);
  const double base = interaction_quadrature(s).value;
  const auto g = s.g;
  s.g = [g](double x1, double rho) { return 3.0 * g(x1, rho); };
  CHECK(interaction_quadrature(s).value == doctest::Approx(3.0 * base).epsilon(1e-8));
}

TEST_CASE("cells") {
  const double whole = interaction_quadrature(exponential_interaction(2.0, 1.0, 8.0, CellKind::WholeSpace)).value;
  const double cell = interaction_quadrature(exponential_interaction(2.0, 1.0, 8.0, CellKind::Cell)).value;
  const double half = interaction_quadrature(exponential_interaction(2.0, 1.0, 8.0, CellKind::HalfCell)).value;
  CHECK(half < cell);
  CHECK(cell < whole);
  // ∫_{-∞}^{4} e^{2x}... split: x < 0 gives e^{-8}/3, 0 < x < 4 gives e^{-8}(1 - e^{-4}).
  CHECK(cell == doctest::Approx(std::exp(-8.0) / 3.0 + std::exp(-8.0) * (1.0 - std::exp(-4.0))).epsilon(1e-8));
}

TEST_CASE("invalid interaction parameters") {
  CHECK_THROWS_AS(interaction_quadrature(exponential_interaction(1.0, 2.0, 8.0)), ConfigError);
  CHECK_THROWS_AS(interaction_quadrature(exponential_interaction(2.0, 1.0, -1.0)), ConfigError);
  CHECK_THROWS_AS(exponential_interaction_exact(1.0, 1.0, 2.0), ConfigError);
}

TEST_CASE("Taylor remainder ratio") {
  CHECK(taylor_remainder_ratio(1.0, 0.0, 3.0) == 0.0);
  CHECK(taylor_remainder_ratio(2.0, 0.0, 2.5) == 0.0);
  // Integer p: identically zero while a + b >= 0.
  CHECK(taylor_remainder_ratio(5.0, -3.0, 2.0) == 0.0);
  CHECK(taylor_remainder_ratio(5.0, 300.0, 3.0) == 0.0);
  // a + b < 0: |a+b|^p / |b|^p
  CHECK(taylor_remainder_ratio(1.0, -3.0, 3.0) == doctest::Approx(8.0 / 27.0));
  // p = 2.5, |b| << a: leading term |C(2.5, 3)| |x|^{1/2}
  const double x = 1e-4;
  CHECK(taylor_remainder_ratio(1.0, x, 2.5) == doctest::Approx(2.5 * 1.5 * 0.5 / 6.0 * std::sqrt(x)).epsilon(1e-3));
  CHECK_THROWS_AS(taylor_remainder_ratio(0.0, 1.0, 3.0), ConfigError);
}

TEST_CASE("Taylor property test") {
  const TaylorCheck a = taylor_remainder_check(20000, 3.0, 1);
  const TaylorCheck b = taylor_remainder_check(20000, 3.0, 1);
  CHECK(a.max_ratio == b.max_ratio);
  CHECK(std::isfinite(a.max_ratio));
  CHECK(a.max_ratio <= 1.0);
  CHECK(a.order == 3);
  const TaylorCheck c = taylor_remainder_check(20000, 2.5, 2);
  CHECK(std::isfinite(c.max_ratio));
  CHECK_THROWS_AS(taylor_remainder_check(10, 1.5, 1), ConfigError);
  CHECK_THROWS_AS(taylor_remainder_check(0, 3.0, 1), ConfigError);
}
