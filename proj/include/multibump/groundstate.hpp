#pragma once

#include <span>
#include <vector>

namespace multibump {

/// Radial ground state U of -ΔU + U - U^p = 0 in R^N, sampled on a uniform
/// radial grid, with the constants of its exponential tail
///   r^{(N-1)/2} e^r U(r) -> L0,   r^{(N-1)/2} e^r |U'(r)| -> L1.
///
/// Immutable after construction; safe to share read-only between threads.
struct GroundStateProfile {
  int dimension = 1;
  double exponent = 3.0;
  std::vector<double> radius;       // r_0 = 0 < r_1 < ... < r_M, uniform
  std::vector<double> values;       // U(r_j)
  std::vector<double> derivatives;  // U'(r_j)
  double center_value = 0.0;
  double tail_L0 = 0.0;
  double tail_L1 = 0.0;
  double tail_match_radius = 15.0;

  // Amplitude c of the decaying linear solution c r^{-nu} K_nu(r),
  // nu = (N-2)/2, that U follows beyond tail_match_radius.
  double tail_amplitude = 0.0;
  // Max |U'' + (N-1)/r U' - U + U^p| over interior nodes.
  double ode_residual = 0.0;
  // Final shooting bracket on U(0).
  double bracket_low = 0.0;
  double bracket_high = 0.0;

  double spacing() const { return radius[1] - radius[0]; }
  double max_radius() const { return radius.back(); }

  /// U(r) for r >= 0. Cubic Hermite interpolation up to tail_match_radius,
  /// the matched Bessel tail beyond. Values below 1e-300 are returned as 0.
  double value(double r) const;
  /// U'(r) (radial derivative, <= 0).
  double derivative(double r) const;
  /// U(|x|) for a point of R^N (any length; only the norm matters).
  double operator()(std::span<const double> point) const;
};

struct GroundStateOptions {
  double max_radius = 25.0;
  double grid_spacing = 0.01;
  double tail_match_radius = 15.0;
};

/// Shooting on U(0): bisect between trajectories that turn back up (U' > 0)
/// and trajectories that cross zero, then continue the decaying branch with
/// an inward integration matched to the outward one.
///
/// Throws ConfigError for N < 1, p < 2, tol <= 0 or a supercritical exponent,
/// NumericalError when no bracket is found or the ODE residual exceeds tol.
GroundStateProfile solve_ground_state(int dimension, double exponent, double tol,
                                      const GroundStateOptions& options = {});

/// U at a point of R^N.
double eval_ground_state(const GroundStateProfile& profile, std::span<const double> point);

struct TailFit {
  double L0 = 0.0;
  double L1 = 0.0;
  double spread_L0 = 0.0;  // (max - min) / mean over the window
  double spread_L1 = 0.0;
};

/// Window means of r^{(N-1)/2} e^r U(r) and r^{(N-1)/2} e^r |U'(r)|.
/// Throws ConfigError if the window leaves the grid or U(r_lo) >= 1e-2, and
/// NumericalError if either spread exceeds 5%.
TailFit fit_tail_constants(const GroundStateProfile& profile, double r_lo, double r_hi);

/// ½U'² - ½U² + U^{p+1}/(p+1) at node j.
double radial_energy(const GroundStateProfile& profile, std::size_t j);

/// Largest admissible exponent check shared by the CLI validation.
bool exponent_is_admissible(int dimension, double exponent);

}  // namespace multibump
