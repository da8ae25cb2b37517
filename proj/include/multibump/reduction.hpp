#pragma once

#include <memory>
#include <vector>

#include "multibump/ansatz.hpp"
#include "multibump/spectrum.hpp"

namespace multibump {

struct ProjectionSplit {
  GridField h_perp;
  /// d_i = <h, φ_i>_{L2} / ‖φ_i‖²_{H1}
  std::vector<double> d;
};

/// h = h_perp + Σ d_i (-Δ+1) φ_i with <h_perp, φ_i>_{L2} = 0.
ProjectionSplit split_projection(const GridField& h, const NearKernelBasis& basis);

/// Which residual of ū enters h: the pointwise identity
/// M(ū) = Σ U_{i,l}^p - (Σ U_{i,l})^p, or the discrete A ū - ū^p. The second
/// makes ū + v an exact solution of the discrete equation up to the
/// near-kernel components.
enum class ResidualMode { Algebraic, Discrete };

/// Solver for (-Δ+1-pū^{p-1}) v = g with <v, φ_i>_{H1} = 0, as the bordered
/// system [W𝕃, Kφ; (Kφ)ᵀ, 0] [v; c] = [W g; 0], factored once.
class BorderedSolver {
 public:
  BorderedSolver(const LinearizedOperator& op, const NearKernelBasis& basis);
  ~BorderedSolver();
  BorderedSolver(const BorderedSolver&) = delete;
  BorderedSolver& operator=(const BorderedSolver&) = delete;

  struct Result {
    Vector v;
    /// Lagrange multipliers; equal to d_i of g when φ spans exact eigenvectors.
    std::vector<double> multipliers;
    /// ‖W𝕃v + Kφc - Wg‖₂ / ‖Wg‖₂
    double relative_residual = 0.0;
  };
  Result solve(const Vector& g) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ReductionOptions {
  int max_iterations = 30;
  ResidualMode mode = ResidualMode::Algebraic;
};

struct ReductionState {
  AnsatzBundle bundle;
  NearKernelBasis basis;
  GridField correction;
  std::vector<double> delta;
  /// d_i of h(v) at the converged v.
  std::vector<double> d_coeffs;
  /// d_i of -M(ū) alone.
  std::vector<double> d_leading;
  std::vector<double> multipliers;
  double v_sup = 0.0;
  double v_h1 = 0.0;
  double max_orthogonality = 0.0;  // max_i |<v, φ_i>_{H1}| / ‖v‖_{H1}
  double constrained_residual = 0.0;
  int iterations = 0;
  std::vector<double> increments;  // sup-norm increment per iteration
};

/// h(v) = -M(ū) + (ū+v)₊^p - ū^p - p ū^{p-1} v.
GridField reduction_rhs(const AnsatzBundle& bundle, const GridField& v,
                        ResidualMode mode = ResidualMode::Algebraic);

/// Fixed point 𝕃v_{n+1} = h(v_n)^⊥, <v_{n+1}, φ_i>_{H1} = 0, with δ_i = 0,
/// until ‖v_{n+1} - v_n‖_∞ <= tol ‖v_{n+1}‖_∞. Throws NumericalError when the
/// increment grows three times in a row or the iteration cap is hit.
ReductionState solve_correction(const AnsatzBundle& bundle, const NearKernelBasis& basis,
                                double tol, const ReductionOptions& options = {});

/// Leading-order projection coefficient of peak i (0-based):
/// (p α_i / ‖φ_i‖²_{H1}) ∫_{Ω_i} U_i^{p-1} (Σ_{j≠i} v_j) ∂U_i/∂x1,
/// U_i being the translate of U at the nearest image of peak i.
double interaction_d(const AnsatzBundle& bundle, const NearKernelBasis& basis, int i);

/// e^{-2σ̲} σ̲^{-1/2}
double interaction_scale(double sigma_min);

enum class DMap { Projection, Interaction };

struct EquilibrateOptions {
  /// |d_i| <= tol · e^{-2σ̲} σ̲^{-1/2}
  double tol = 1e-6;
  int max_iterations = 25;
  double fd_step = 1e-3;
  int eigen_count = 0;  // 0: 2k + 2
  double eigen_tol = 1e-9;
  DMap map = DMap::Projection;
};

struct EquilibrateResult {
  PeakConfiguration config;
  std::vector<double> d;
  int newton_steps = 0;
  int evaluations = 0;
  std::vector<std::vector<double>> d_trace;
  std::vector<std::vector<double>> position_trace;
};

/// d_i for a configuration on the given grid.
std::vector<double> projection_coefficients(const PeakConfiguration& config,
                                            std::shared_ptr<const GroundStateProfile> profile,
                                            const StripGrid& grid, const EquilibrateOptions& options);

/// Gauss-Newton on positions ↦ (d_1..d_k) with peak 1 pinned, forward
/// difference Jacobian, steps halved while a gap leaves the separation regime
/// or ‖d‖ fails to decrease. Throws ConfigError for k < 2 and NumericalError
/// on a singular Jacobian or a failed line search.
EquilibrateResult equilibrate(const PeakConfiguration& initial,
                              std::shared_ptr<const GroundStateProfile> profile,
                              const StripGrid& grid, const EquilibrateOptions& options = {});

}  // namespace multibump
