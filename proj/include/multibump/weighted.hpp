#pragma once

#include "multibump/ansatz.hpp"
#include "multibump/reduction.hpp"
#include "multibump/spectrum.hpp"

namespace multibump {

/// d_x: distance from each node to the nearest peak image (all periodic
/// images, so the ghost peaks a^0 and a^{k+1} are included).
GridField distance_to_peaks(const StripGrid& grid, const PeakConfiguration& config);

struct WeightedNorms {
  double eta = 0.0;
  double value = 0.0;     // sup |f| e^{η d_x}
  double gradient = 0.0;  // sup |∇f| e^{η d_x}
  double total = 0.0;     // sup (|f| + |∇f|) e^{η d_x}
};

/// Throws ConfigError unless 0 < η < 1.
WeightedNorms weighted_norms(const GridField& field, const PeakConfiguration& config, double eta);

struct WeightedReport {
  double eta = 0.0;
  double input_weighted_norm = 0.0;   // sup |h| e^{η d_x}
  double output_weighted_norm = 0.0;  // sup (|ξ| + |∇ξ|) e^{η d_x}
  double ratio = 0.0;
};

WeightedReport weighted_report(const GridField& h, const GridField& xi,
                               const PeakConfiguration& config, double eta);

struct OrthogonalSolveInfo {
  double relative_residual = 0.0;
  double max_orthogonality = 0.0;  // max_i |<ξ, (-Δ+1)φ_i>_{L2}| / (‖ξ‖_{H1} ‖φ_i‖_{H1})
};

/// ξ with 𝕃ξ = h^⊥ and <ξ, φ_i>_{H1} = 0; h is projected first. Throws
/// NumericalError when the bordered residual exceeds tol.
GridField solve_orthogonal(const GridField& h, const AnsatzBundle& bundle,
                           const NearKernelBasis& basis, double tol,
                           OrthogonalSolveInfo* info = nullptr);

}  // namespace multibump
