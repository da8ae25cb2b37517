#include "multibump/weighted.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "multibump/error.hpp"

namespace multibump {

GridField distance_to_peaks(const StripGrid& grid, const PeakConfiguration& config) {
  const double T = grid.period();
  const auto positions = config.positions();
  GridField d(grid);
  for (int i = 0; i < grid.nodes_x1; ++i) {
    double dx = INFINITY;
    for (double p : positions) dx = std::min(dx, std::abs(std::remainder(grid.x1(i) - p, T)));
    for (int j = 0; j < grid.nodes_xp; ++j) d(i, j) = std::hypot(dx, grid.x2(j));
  }
  return d;
}

WeightedNorms weighted_norms(const GridField& field, const PeakConfiguration& config, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  const GridField d = distance_to_peaks(field.grid, config);
  const GridField grad = gradient_magnitude(field);
  WeightedNorms out;
  out.eta = eta;
  for (Eigen::Index n = 0; n < field.data.size(); ++n) {
    const double w = std::exp(eta * d.data[n]);
    const double v = std::abs(field.data[n]) * w;
    const double g = grad.data[n] * w;
    out.value = std::max(out.value, v);
    out.gradient = std::max(out.gradient, g);
    out.total = std::max(out.total, v + g);
  }
  return out;
}

WeightedReport weighted_report(const GridField& h, const GridField& xi,
                               const PeakConfiguration& config, double eta) {
  WeightedReport r;
  r.eta = eta;
  r.input_weighted_norm = weighted_norms(h, config, eta).value;
  r.output_weighted_norm = weighted_norms(xi, config, eta).total;
  r.ratio = r.input_weighted_norm > 0.0 ? r.output_weighted_norm / r.input_weighted_norm : 0.0;
  return r;
}

GridField solve_orthogonal(const GridField& h, const AnsatzBundle& bundle,
                           const NearKernelBasis& basis, double tol, OrthogonalSolveInfo* info) {
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  if (!(h.grid == bundle.grid)) throw ConfigError("fields live on different grids");
  const ProjectionSplit split = split_projection(h, basis);
  const LinearizedOperator op(bundle);
  const BorderedSolver solver(op, basis);
  BorderedSolver::Result r = solver.solve(split.h_perp.data);
  GridField xi(bundle.grid, std::move(r.v));
  const Helmholtz hm(bundle.grid);
  const double xi_h1 = h1_norm(xi);
  double orth = 0.0;
  for (const GridField& phi : basis.phi) {
    const Vector kphi = hm.stiffness() * phi.data;
    const double norm_phi = std::sqrt(phi.data.dot(kphi));
    if (xi_h1 > 0.0) orth = std::max(orth, std::abs(xi.data.dot(kphi)) / (xi_h1 * norm_phi));
  }
  if (info) *info = {r.relative_residual, orth};
  if (!(r.relative_residual < tol)) {
    std::ostringstream msg;
    msg << "orthogonal solve residual " << r.relative_residual << " exceeds tol " << tol;
    throw NumericalError(msg.str());
  }
  return xi;
}

}  // namespace multibump
