#pragma once

#include <cstdint>
#include <vector>

#include "multibump/ansatz.hpp"
#include "multibump/domain.hpp"

namespace multibump {

/// 𝕃 = -Δ + 1 - p ū^{p-1} in weighted form: W 𝕃 = K - P with P = W diag(p ū₊^{p-1}).
class LinearizedOperator {
 public:
  LinearizedOperator(const StripGrid& grid, const Vector& ubar, double exponent);
  explicit LinearizedOperator(const AnsatzBundle& bundle);

  const StripGrid& grid() const { return helmholtz_.grid(); }
  const Helmholtz& helmholtz() const { return helmholtz_; }
  /// p ū₊^{p-1} per node.
  const Vector& potential() const { return potential_; }
  /// 𝕃 u (unweighted).
  Vector apply(const Vector& u) const;
  /// K - P, symmetric.
  SparseMatrix weighted_matrix() const;

 private:
  Helmholtz helmholtz_;
  Vector potential_;
};

LinearizedOperator assemble_linearized(const AnsatzBundle& bundle);

struct EigenOptions {
  double gap_threshold = 0.1;
  int max_restarts = 200;
  int krylov_depth = 6;
  std::uint64_t seed = 20240601;
};

/// Lowest eigenpairs of 𝕃ξ = λ(-Δ+1)ξ. Eigenvectors are B-orthonormal:
/// <ξ_a, ξ_b>_{H1} = δ_ab.
struct SpectralResult {
  std::vector<double> eigenvalues;
  std::vector<GridField> eigenvectors;
  /// ‖ξ - (-Δ+1)^{-1}𝕃ξ/... ‖: H¹ norm of K^{-1}(W𝕃ξ) - λξ.
  std::vector<double> residuals;
  int near_kernel_count = 0;
  /// overlap(a, i) = <ξ_a, t_i / ‖t_i‖_{H1}>_{H1}, t_i = ∂v_i/∂x1.
  Eigen::MatrixXd overlap_matrix;
  int restarts = 0;
};

/// Block Krylov iteration with Rayleigh-Ritz restarts on the pencil
/// (P, K), whose largest values μ = 1 - λ give the lowest λ.
/// Throws NumericalError if unconverged (message lists the residuals).
SpectralResult lowest_eigenpairs(const LinearizedOperator& op, int count, double tol,
                                 const EigenOptions& options = {});

/// Fills overlap_matrix against the bundle's translation modes.
void compute_overlaps(SpectralResult& result, const AnsatzBundle& bundle);

/// H¹-orthonormal basis (φ_1..φ_k) of the near-kernel, rotated to match the
/// translation modes, with α_i = <φ_i, t_i>_{H1} / ‖t_i‖²_{H1}.
struct NearKernelBasis {
  std::vector<GridField> phi;
  std::vector<double> alpha;
  /// ‖φ_i - α_i t_i‖_{H1}
  std::vector<double> alignment_residual;
  std::vector<double> eigenvalues;
  /// Principal angles (rad) between span φ and span t.
  std::vector<double> principal_angles;

  int k() const { return static_cast<int>(phi.size()); }
};

/// Throws NumericalError when near_kernel_count differs from the peak count.
NearKernelBasis near_kernel_basis(const SpectralResult& result, const AnsatzBundle& bundle,
                                  double gap_threshold = 0.1);

/// Principal angles (rad, ascending) between two subspaces in the H¹ product.
std::vector<double> principal_angles(const std::vector<GridField>& a,
                                     const std::vector<GridField>& b);

/// Convenience: eigen solve + overlaps + basis for a bundle.
struct NearKernelRun {
  SpectralResult spectrum;
  NearKernelBasis basis;
};
NearKernelRun compute_near_kernel(const AnsatzBundle& bundle, int count, double tol,
                                  const EigenOptions& options = {});

}  // namespace multibump
