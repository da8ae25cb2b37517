#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "multibump/ansatz.hpp"
#include "multibump/domain.hpp"
#include "multibump/groundstate.hpp"

namespace multibump {

struct NewtonOptions {
  /// Stop when the quadrature L² norm of -Δu + u - u₊^p drops below tol.
  double tol = 1e-10;
  int max_iterations = 30;
  int max_halvings = 30;
};

/// u = base + w. The residual of the base is supplied separately so that it
/// can come from an exact identity instead of the stencil.
struct NewtonProblem {
  StripGrid grid;
  double exponent = 3.0;
  Vector base;
  Vector base_residual;  // A base - base₊^p
  Vector initial_correction;
  /// Pinning directions t_q: <u - (base + initial_correction), t_q>_{H1} = 0.
  std::vector<Vector> pin_modes;
};

struct DancerSolution {
  GridField field;
  /// u - base; with a periodized ground-state base this is ψ itself.
  GridField correction;
  double epsilon = 0.0;
  int k = 1;
  int pin = 0;
  double pin_location = 0.0;
  std::optional<GridField> psi;
  /// Residual norm before each step and after the last one.
  std::vector<double> newton_history;
  int iterations = 0;
  /// Lagrange multipliers of the pinning rows: W F(u) = -Σ μ_q K t_q.
  std::vector<double> multipliers;
  /// Peak positions used to build the final pinned problem.
  std::vector<double> positions;
  int relaxation_steps = 0;
  double min_value = 0.0;
  bool converged = false;
};

/// Damped Newton with a bordered pinning row and residual line search; the
/// derivative of u₊^p is p u₊^{p-1} 1{u > 0}. Stops at tol or when the step
/// reaches roundoff. Throws NumericalError on a singular Jacobian or when
/// damping cannot reduce the residual.
DancerSolution newton_core(const NewtonProblem& problem, const NewtonOptions& options = {});

/// Newton from an arbitrary initial field, pinned along pin_mode.
DancerSolution newton_solve(const GridField& initial, const GridField& pin_mode, double exponent,
                            const NewtonOptions& options = {});

/// Newton from the ansatz ū, pinned along ∂v_pin/∂x1.
DancerSolution newton_solve(const AnsatzBundle& bundle, int pin, const NewtonOptions& options = {});

struct RelaxOptions {
  /// Stop when every multiplier is below tol · e^{-2σ̲} σ̲^{-1/2}.
  double tol = 1e-9;
  int max_steps = 25;
  double fd_step = 1e-3;
};

/// For k >= 2 starts far from equilibrium: pin every peak along ∂v_q/∂x1,
/// root-find the free positions (peak `pin` fixed) until the multipliers
/// vanish, then finish with a single pin. Throws NumericalError when the
/// position search fails.
DancerSolution relax_and_solve(const PeakConfiguration& config,
                               std::shared_ptr<const GroundStateProfile> profile,
                               const StripGrid& grid, int pin = 0,
                               const NewtonOptions& options = {}, const RelaxOptions& relax = {});

/// Ground state of the discrete equation on a periodic box of m periods of
/// `grid` (same spacings, m T >= min_length), peak on node 0.
struct DiscreteGroundState {
  StripGrid box;
  Vector values;
  int multiple = 1;
  double exponent = 3.0;
  double residual = 0.0;
  int iterations = 0;
};

DiscreteGroundState discrete_ground_state(const GroundStateProfile& profile, const StripGrid& grid,
                                          double min_length = 80.0,
                                          const NewtonOptions& options = {});

/// Σ_q Σ_l U_h(x - P_q - lT) on `grid` for k uniform peaks on nodes
/// i_q = q n1/k, together with its residual Σ U_h^p - (Σ U_h)^p.
struct PeriodizedBase {
  GridField base;
  GridField residual;
  std::vector<int> peak_nodes;
};

PeriodizedBase periodize(const DiscreteGroundState& gs, const StripGrid& grid, int k);

/// Dancer solution for k uniform peaks with ψ = u_D - Σ_l U_h(x - P - lT)
/// measured against the discrete ground state.
DancerSolution dancer_with_psi(std::shared_ptr<const GroundStateProfile> profile, double epsilon,
                               int k, double transverse_extent = 14.0, double spacing = 0.2,
                               const NewtonOptions& options = {});

/// Fourier interpolation along x1: g(x1, x2) = u(x1 - tau, x2).
GridField shift_x1(const GridField& field, double tau);
/// g(x1, x2) = u(2c - x1, x2).
GridField reflect_x1(const GridField& field, double center);
/// Local maximum of the trigonometric interpolant of u(., 0) nearest to
/// `guess`.
double peak_location(const GridField& field, double guess);

struct AlignmentReport {
  double shift = 0.0;  // tau with shift_x1(a, tau) ≈ b
  double sup_difference = 0.0;
};
AlignmentReport align_x1(const GridField& a, const GridField& b);

struct EvennessReport {
  double center = 0.0;
  double sup_difference = 0.0;
  double threshold = 0.0;
  bool passed = false;
};
/// Reflects about the peak located near pin_location + offset.
EvennessReport verify_evenness(const DancerSolution& sol, double tol, double offset = 0.0);

struct PeriodReport {
  double period_difference = 0.0;       // ‖u(. + T/k) - u‖_∞
  double half_period_difference = 0.0;  // ‖u(. + T/(2k)) - u‖_∞
  double amplitude = 0.0;
  bool passed = false;
};
PeriodReport verify_minimal_period(const DancerSolution& sol, double tol);

struct PsiFitPoint {
  double epsilon = 0.0;
  double abscissa = 0.0;  // π / (kε)
  double weighted_sup = 0.0;
  double psi_sup = 0.0;
  double psi_at_peak = 0.0;
};

struct PsiFit {
  double eta = 0.0;
  double eta_prime = 0.0;
  std::vector<PsiFitPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double predicted_slope = 0.0;  // -2η'
  bool monotone = true;
};

/// Least-squares fit of log sup |ψ| e^{η d_x} against π/(kε). Throws
/// ConfigError unless 0 < η < 1, 0 < η' < 1 and η' < p - 1 - η.
PsiFit psi_decay_fit(const std::vector<DancerSolution>& solutions, double eta, double eta_prime,
                     double exponent);

}  // namespace multibump
