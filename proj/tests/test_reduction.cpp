#include <cmath>
#include <memory>

#include "doctest.h"
#include "multibump/error.hpp"
#include "multibump/reduction.hpp"

using namespace multibump;

namespace {
std::shared_ptr<const GroundStateProfile> profile() {
  static const auto p = std::make_shared<const GroundStateProfile>(solve_ground_state(2, 3.0, 1e-9));
  return p;
}
}  // namespace

TEST_CASE("projection split") {
  const double eps = M_PI / 12.0;
  const AnsatzBundle b = build_ansatz(PeakConfiguration::uniform(eps, 2), profile(), StripGrid::make(eps, 14.0, 0.2, 2));
  const NearKernelRun run = compute_near_kernel(b, 6, 1e-9);
  const GridField h = sample(b.grid, [](double x1, double x2) { return std::exp(-0.05 * x1 * x1 - 0.3 * x2 * x2) * (1.0 + 0.1 * x1); });
  const ProjectionSplit s = split_projection(h, run.basis);
  for (const GridField& phi : run.basis.phi) CHECK(std::abs(l2_product(s.h_perp, phi)) < 1e-12 * l2_norm(h));
}

TEST_CASE("uniform configuration has d = 0") {
  const double eps = M_PI / 12.0;
  const AnsatzBundle b = build_ansatz(PeakConfiguration::uniform(eps, 2), profile(), StripGrid::make(eps, 14.0, 0.2, 2));
  const NearKernelRun run = compute_near_kernel(b, 6, 1e-9);
  const ReductionState st = solve_correction(b, run.basis, 1e-10);
  const double scale = interaction_scale(6.0);
  for (double d : st.d_coeffs) CHECK(std::abs(d) < 1e-9 * scale);
  CHECK(st.max_orthogonality < 1e-12);
  CHECK(st.iterations <= 30);
}

TEST_CASE("two unequal gaps: correction and d_i") {
  const double s = 5.0;
  const double eps = 2.0 * M_PI / (4.0 * s + 2.0);
  const auto cfg = PeakConfiguration::from_positions(eps, {-M_PI / eps, -M_PI / eps + 2.0 * s});
  const AnsatzBundle b = build_ansatz(cfg, profile(), StripGrid::make(eps, 14.0, 0.2, 1));
  const NearKernelRun run = compute_near_kernel(b, 6, 1e-9);
  const ReductionState st = solve_correction(b, run.basis, 1e-10);
  const double scale = interaction_scale(s);
  CHECK(st.v_sup / scale > 1.0);
  CHECK(st.v_sup / scale < 100.0);
  // Antisymmetric pair: the peaks attract each other across the short gap.
  CHECK(st.d_coeffs[0] == doctest::Approx(-st.d_coeffs[1]).epsilon(1e-6));
  for (int i = 0; i < 2; ++i)
    CHECK(interaction_d(b, run.basis, i) == doctest::Approx(st.d_coeffs[static_cast<std::size_t>(i)]).epsilon(0.2));
  // The bordered multipliers carry d_i.
  CHECK(st.multipliers[0] == doctest::Approx(st.d_coeffs[0]).epsilon(1e-6));
}

TEST_CASE("equilibrate rejects a single peak and keeps uniform starts") {
  const double eps = 0.25;
  const StripGrid grid = StripGrid::make(eps, 14.0, 0.2, 2);
  CHECK_THROWS_AS(equilibrate(PeakConfiguration::uniform(eps, 1), profile(), grid), ConfigError);
  const EquilibrateResult r = equilibrate(PeakConfiguration::uniform(eps, 2), profile(), grid);
  CHECK(r.newton_steps == 0);
}
