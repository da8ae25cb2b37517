#include <cmath>
#include <memory>

#include "doctest.h"
#include "multibump/dancer.hpp"
#include "multibump/error.hpp"

using namespace multibump;

namespace {
std::shared_ptr<const GroundStateProfile> profile() {
  static const auto p = std::make_shared<const GroundStateProfile>(solve_ground_state(2, 3.0, 1e-9));
  return p;
}
}  // namespace

TEST_CASE("Fourier shift, reflection and alignment of a trigonometric field") {
  const StripGrid g = StripGrid::make(0.5, 4.0, 0.25, 1);
  const double k = 0.5 * 3.0;
  auto f = [&](double x1, double x2) { return std::cos(k * x1 + 0.3) * std::exp(-x2 * x2); };
  const GridField u = sample(g, f);
  const GridField s = shift_x1(u, 0.37);
  const GridField expect = sample(g, [&](double x1, double x2) { return f(x1 - 0.37, x2); });
  CHECK((s.data - expect.data).cwiseAbs().maxCoeff() < 1e-12);
  const GridField r = reflect_x1(u, 0.2);
  const GridField rexp = sample(g, [&](double x1, double x2) { return f(0.4 - x1, x2); });
  CHECK((r.data - rexp.data).cwiseAbs().maxCoeff() < 1e-12);

  const GridField bump = sample(g, [&](double x1, double x2) { return std::exp(std::cos(0.5 * x1) - x2 * x2); });
  const AlignmentReport al = align_x1(bump, shift_x1(bump, 0.9));
  CHECK(al.shift == doctest::Approx(0.9).epsilon(1e-8));
  CHECK(al.sup_difference < 1e-10);
  CHECK(peak_location(shift_x1(bump, 0.9), 1.0) == doctest::Approx(0.9).epsilon(1e-8));
}

TEST_CASE("single-peak Newton solve") {
  const double eps = 0.3;
  const AnsatzBundle b = build_ansatz(PeakConfiguration::uniform(eps, 1), profile(), StripGrid::make(eps, 14.0, 0.2, 1));
  const DancerSolution s = newton_solve(b, 0);
  CHECK(s.converged);
  CHECK(s.iterations <= 8);
  CHECK(s.newton_history.back() < 1e-10);
  // Quadratic convergence: each residual well below the square of the previous.
  CHECK(s.newton_history[2] < 10.0 * s.newton_history[1] * s.newton_history[1]);
  CHECK(verify_evenness(s, 1e-10).passed);
  CHECK(s.min_value > -1e-8);
}

TEST_CASE("periodized discrete ground state") {
  const double eps = 0.3;
  const StripGrid grid = StripGrid::make(eps, 14.0, 0.2, 2);
  const DiscreteGroundState gs = discrete_ground_state(*profile(), grid);
  CHECK(gs.box.period() * 1.0 >= 80.0);
  CHECK(gs.residual < 1e-12);
  const PeriodizedBase base = periodize(gs, grid, 2);
  REQUIRE(base.peak_nodes.size() == 2);
  CHECK(base.peak_nodes[1] == grid.nodes_x1 / 2);
  CHECK(std::abs(base.base(base.peak_nodes[0], 0) - base.base(base.peak_nodes[1], 0)) < 1e-14);
  CHECK_THROWS_AS(periodize(gs, grid, 3), ConfigError);
}

TEST_CASE("psi fit validation") {
  std::vector<DancerSolution> none;
  CHECK_THROWS_AS(psi_decay_fit(none, 1.2, 0.5, 3.0), ConfigError);
  CHECK_THROWS_AS(psi_decay_fit(none, 0.3, 0.5, 3.0), ConfigError);
  CHECK_THROWS_AS(psi_decay_fit(none, 0.5, 0.9, 2.0), ConfigError);
}
