#include <cmath>
#include <memory>

#include "doctest.h"
#include "multibump/spectrum.hpp"

using namespace multibump;

namespace {
std::shared_ptr<const GroundStateProfile> profile() {
  static const auto p = std::make_shared<const GroundStateProfile>(solve_ground_state(2, 3.0, 1e-9));
  return p;
}

AnsatzBundle uniform_bundle(int k, double half_gap) {
  const double eps = M_PI / (k * half_gap);
  return build_ansatz(PeakConfiguration::uniform(eps, k), profile(), StripGrid::make(eps, 14.0, 0.2, k));
}
}  // namespace

TEST_CASE("single peak: 1 - p and a translation mode") {
  const AnsatzBundle b = uniform_bundle(1, 8.0);
  const NearKernelRun run = compute_near_kernel(b, 4, 1e-9);
  const auto& ev = run.spectrum.eigenvalues;
  REQUIRE(ev.size() == 4);
  CHECK(ev[0] == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(run.spectrum.near_kernel_count == 1);
  CHECK(std::abs(run.spectrum.overlap_matrix(1, 0)) > 0.99);
  for (double r : run.spectrum.residuals) CHECK(r < 1e-8);
  CHECK(std::is_sorted(ev.begin(), ev.end()));
}

TEST_CASE("eigenvectors are H1-orthonormal") {
  const AnsatzBundle b = uniform_bundle(1, 6.0);
  const SpectralResult s = lowest_eigenpairs(LinearizedOperator(b), 3, 1e-9);
  for (std::size_t a = 0; a < s.eigenvectors.size(); ++a)
    for (std::size_t c = 0; c < s.eigenvectors.size(); ++c)
      CHECK(h1_product(s.eigenvectors[a], s.eigenvectors[c]) == doctest::Approx(a == c ? 1.0 : 0.0).epsilon(1e-8));
}

TEST_CASE("deterministic start block") {
  const AnsatzBundle b = uniform_bundle(1, 5.0);
  const LinearizedOperator op(b);
  const SpectralResult s1 = lowest_eigenpairs(op, 3, 1e-9);
  const SpectralResult s2 = lowest_eigenpairs(op, 3, 1e-9);
  CHECK(s1.eigenvalues == s2.eigenvalues);
}

TEST_CASE("two symmetric peaks") {
  const AnsatzBundle b = uniform_bundle(2, 7.0);
  const NearKernelRun run = compute_near_kernel(b, 6, 1e-9);
  CHECK(run.spectrum.near_kernel_count == 2);
  REQUIRE(run.basis.k() == 2);
  // Reflection symmetry maps one mode onto the other.
  CHECK(std::abs(run.basis.alpha[0]) == doctest::Approx(std::abs(run.basis.alpha[1])).epsilon(0.01));
  for (double a : run.basis.principal_angles) CHECK(a < 0.1);
  // φ_i are H1-orthonormal.
  CHECK(std::abs(h1_product(run.basis.phi[0], run.basis.phi[1])) < 1e-8);
}

TEST_CASE("principal angles of a subspace with itself vanish") {
  const AnsatzBundle b = uniform_bundle(2, 6.0);
  const auto angles = principal_angles(b.translation_modes, b.translation_modes);
  for (double a : angles) CHECK(a < 1e-6);
}
