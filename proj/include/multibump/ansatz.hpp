#pragma once

#include <memory>
#include <vector>

#include "multibump/domain.hpp"
#include "multibump/groundstate.hpp"

namespace multibump {

/// k peaks a^1 < ... < a^k in [-π, π) on the circle of period 2π, placed at
/// x1 = a^i / ε on the strip. Ghost angles a^0 = a^k - 2π and
/// a^{k+1} = a^1 + 2π close the cycle.
struct PeakConfiguration {
  double epsilon = 1.0;
  std::vector<double> angles;
  int lattice_cutoff = 1;

  /// Wraps the angles into [-π, π), sorts them, checks the separation regime
  /// (every gap between consecutive peak images > 2) and sets the lattice
  /// cutoff L = ceil(ε (30 + max gap) / 2π) + 1. Throws ConfigError.
  static PeakConfiguration make(double epsilon, std::vector<double> angles);
  /// Same, from x1 positions instead of angles.
  static PeakConfiguration from_positions(double epsilon, const std::vector<double>& positions);
  /// a^i = offset + 2π (i-1) / k.
  static PeakConfiguration uniform(double epsilon, int k, double offset = -M_PI);

  int k() const { return static_cast<int>(angles.size()); }
  double period() const { return 2.0 * M_PI / epsilon; }
  double position(int i) const { return angles[static_cast<std::size_t>(i)] / epsilon; }
  std::vector<double> positions() const;
  /// gaps()[i] = distance from peak i to the next peak image (wrapping).
  std::vector<double> gaps() const;
  /// σ_i: half the distance from peak i to the nearest other peak image.
  std::vector<double> half_gaps() const;
  double sigma_min() const;
};

/// ū_ε = Σ_i v_i, v_i = Σ_{|l| <= L} U(x1 - a^i/ε - 2πl/ε, x2), sampled on a grid,
/// with the translation modes ∂v_i/∂x1, the Voronoi cells Ω_i and the residual
/// M(ū) = Σ U_{i,l}^p - (Σ U_{i,l})^p evaluated from the profile.
struct AnsatzBundle {
  PeakConfiguration config;
  std::shared_ptr<const GroundStateProfile> profile;
  StripGrid grid;
  GridField ubar;
  std::vector<GridField> peak_fields;
  std::vector<GridField> translation_modes;
  std::vector<int> cell_labels;  // 0-based peak index per node
  GridField interaction_residual;

  double exponent() const { return profile->exponent; }
};

/// Throws ConfigError when the profile is not two-dimensional or the grid
/// period differs from 2π/ε.
AnsatzBundle build_ansatz(const PeakConfiguration& config,
                          std::shared_ptr<const GroundStateProfile> profile, const StripGrid& grid);

/// M(ū) through the algebraic identity (no discrete Laplacian involved).
GridField residual(const AnsatzBundle& bundle);

/// A ū - ū₊^p with the discrete operator; agrees with residual() up to the
/// O(h²) truncation error of the stencil.
GridField residual_via_operator(const AnsatzBundle& bundle);

struct ResidualNorms {
  double l2 = 0.0;
  double sup = 0.0;
  double sigma_min = 0.0;
  /// e^{-2σ̲} σ̲^{-1/2} for p > 2 and e^{-2ησ̲} σ̲^{-1/2} for p = 2.
  double predicted_rate = 0.0;
  double l2_ratio = 0.0;
  double sup_ratio = 0.0;
};

/// Quadrature L² norm and sup norm of M(ū) with the predicted decay rate.
ResidualNorms residual_l2(const AnsatzBundle& bundle, double eta_for_p2 = 0.9);

/// (a + b)₊^p - a^p - p a^{p-1} b for a >= 0, accurate when |b| << a.
double superlinear_remainder(double a, double b, double p);

/// (Σ terms)^p - Σ terms^p for nonnegative terms, accurate when one term
/// dominates.
double power_of_sum_defect(std::span<const double> terms, double p);

}  // namespace multibump
