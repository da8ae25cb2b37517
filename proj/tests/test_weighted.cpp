#include <cmath>
#include <memory>

#include "doctest.h"
#include "multibump/error.hpp"
#include "multibump/weighted.hpp"

using namespace multibump;

TEST_CASE("distance to peaks includes periodic images") {
  const double eps = 0.25;
  const auto cfg = PeakConfiguration::uniform(eps, 2);
  const StripGrid grid = StripGrid::make(eps, 14.0, 0.2, 2);
  const GridField d = distance_to_peaks(grid, cfg);
  CHECK(d(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  // Node 0 sits on peak 1; the last node is one step left of it across the seam.
  CHECK(d(grid.nodes_x1 - 1, 0) == doctest::Approx(grid.h1()));
  CHECK(d.sup_norm() <= std::hypot(cfg.period() / 4.0, 14.0) + 1e-12);
}

TEST_CASE("weighted norm of e^{-d}") {
  const double eps = 0.25;
  const auto cfg = PeakConfiguration::uniform(eps, 1);
  const StripGrid grid = StripGrid::make(eps, 14.0, 0.2, 1);
  const GridField d = distance_to_peaks(grid, cfg);
  GridField f(grid);
  f.data = (-d.data.array()).exp().matrix();
  const WeightedNorms w = weighted_norms(f, cfg, 0.5);
  CHECK(w.value == doctest::Approx(1.0));
  CHECK(w.total >= w.value);
  CHECK_THROWS_AS(weighted_norms(f, cfg, 1.0), ConfigError);
  CHECK_THROWS_AS(weighted_norms(f, cfg, 0.0), ConfigError);
}

TEST_CASE("orthogonal solve") {
  const auto profile = std::make_shared<const GroundStateProfile>(solve_ground_state(2, 3.0, 1e-9));
  const double eps = M_PI / 12.0;
  const auto cfg = PeakConfiguration::uniform(eps, 2);
  const AnsatzBundle b = build_ansatz(cfg, profile, StripGrid::make(eps, 14.0, 0.2, 2));
  const NearKernelRun run = compute_near_kernel(b, 6, 1e-9);
  const GridField h = sample(b.grid, [](double x1, double x2) { return std::exp(-0.1 * (x1 - 1.0) * (x1 - 1.0) - x2 * x2); });
  OrthogonalSolveInfo info;
  const GridField xi = solve_orthogonal(h, b, run.basis, 1e-8, &info);
  CHECK(info.max_orthogonality < 1e-10);
  const WeightedReport r = weighted_report(h, xi, cfg, 0.5);
  CHECK(r.ratio > 0.0);
  CHECK(std::isfinite(r.ratio));
}
