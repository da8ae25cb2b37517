#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "multibump/ansatz.hpp"
#include "multibump/error.hpp"

using namespace multibump;

namespace {
std::shared_ptr<const GroundStateProfile> profile() {
  static const auto p = std::make_shared<const GroundStateProfile>(solve_ground_state(2, 3.0, 1e-9));
  return p;
}
}  // namespace

TEST_CASE("peak configurations") {
  const auto u = PeakConfiguration::uniform(0.2, 3);
  CHECK(u.k() == 3);
  for (double g : u.gaps()) CHECK(g == doctest::Approx(u.period() / 3.0));
  CHECK(u.sigma_min() == doctest::Approx(u.period() / 6.0));
  const auto c = PeakConfiguration::make(0.2, {4.0, 0.0, 2.1});
  CHECK(c.angles.front() < c.angles.back());
  CHECK(c.positions()[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(PeakConfiguration::from_positions(0.3, {0.0, 1.5}), ConfigError);
  CHECK_THROWS_AS(PeakConfiguration::make(0.0, {0.0}), ConfigError);
}

TEST_CASE("remainder helpers") {
  CHECK(superlinear_remainder(1.0, 0.0, 3.0) == 0.0);
  // (1 + b)^3 - 1 - 3b = 3b² + b³
  CHECK(superlinear_remainder(1.0, 1e-4, 3.0) == doctest::Approx(3e-8 + 1e-12).epsilon(1e-10));
  CHECK(superlinear_remainder(1.0, 0.5, 3.0) == doctest::Approx(0.875).epsilon(1e-14));
  const std::vector<double> one{0.7};
  CHECK(power_of_sum_defect(one, 3.0) == 0.0);
  const std::vector<double> two{1.0, 1.0};
  CHECK(power_of_sum_defect(two, 3.0) == doctest::Approx(6.0));
  const std::vector<double> tiny{1.0, 1e-9};
  CHECK(power_of_sum_defect(tiny, 3.0) == doctest::Approx(3e-9).epsilon(1e-6));
}

TEST_CASE("ansatz residual matches the operator residual to O(h²)") {
  const double eps = 2.0 * M_PI / 20.0;
  const auto cfg = PeakConfiguration::from_positions(eps, {-10.0, 0.0});
  auto gap = [&](double h) {
    const AnsatzBundle b = build_ansatz(cfg, profile(), StripGrid::make(eps, 14.0, h, 1));
    return (residual(b).data - residual_via_operator(b).data).cwiseAbs().maxCoeff();
  };
  const double coarse = gap(0.4), fine = gap(0.2);
  CHECK(fine < coarse);
  CHECK(coarse / fine > 3.0);
}

TEST_CASE("residual rate ratio is stable") {
  std::vector<double> ratios;
  for (int s : {4, 6}) {
    const double eps = 2.0 * M_PI / (4.0 * s);
    const AnsatzBundle b = build_ansatz(PeakConfiguration::uniform(eps, 2), profile(), StripGrid::make(eps, 14.0, 0.2, 2));
    const ResidualNorms n = residual_l2(b);
    CHECK(n.sigma_min == doctest::Approx(s));
    CHECK(n.predicted_rate == doctest::Approx(std::exp(-2.0 * s) / std::sqrt(double(s))));
    ratios.push_back(n.sup_ratio);
  }
  CHECK(ratios[0] / ratios[1] < 3.0);
  CHECK(ratios[1] / ratios[0] < 3.0);
}

TEST_CASE("cells and translation modes") {
  const double eps = 0.25;
  const auto cfg = PeakConfiguration::uniform(eps, 2);
  const StripGrid grid = StripGrid::make(eps, 14.0, 0.2, 2);
  const AnsatzBundle b = build_ansatz(cfg, profile(), grid);
  CHECK(b.peak_fields.size() == 2);
  CHECK(b.translation_modes.size() == 2);
  CHECK((b.ubar.data - b.peak_fields[0].data - b.peak_fields[1].data).cwiseAbs().maxCoeff() < 1e-14);
  const int i0 = grid.wrap(static_cast<int>(std::lround((cfg.position(0) - grid.x1(0)) / grid.h1())));
  CHECK(b.cell_labels[static_cast<std::size_t>(grid.index(i0, 0))] == 0);
  CHECK_THROWS_AS(build_ansatz(cfg, profile(), StripGrid::make(0.3, 14.0, 0.2, 2)), ConfigError);
}
