#include "multibump/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

#include "multibump/error.hpp"

namespace multibump {

ProjectionSplit split_projection(const GridField& h, const NearKernelBasis& basis) {
  ProjectionSplit out;
  out.h_perp = h;
  if (basis.phi.empty()) return out;
  const Helmholtz op(h.grid);
  for (const GridField& phi : basis.phi) {
    if (!(phi.grid == h.grid)) throw ConfigError("fields live on different grids");
    const Vector kphi = op.stiffness() * phi.data;
    const double norm2 = phi.data.dot(kphi);
    const double di = l2_product(h, phi) / norm2;
    out.d.push_back(di);
    out.h_perp.data -= di * op.apply(phi.data);
  }
  return out;
}

struct BorderedSolver::Impl {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  Vector weights;
  int n = 0;
  int k = 0;
  SparseMatrix matrix;
};

BorderedSolver::BorderedSolver(const LinearizedOperator& op, const NearKernelBasis& basis)
    : impl_(std::make_unique<Impl>()) {
  const SparseMatrix a = op.weighted_matrix();
  const int n = static_cast<int>(a.rows());
  const int k = basis.k();
  impl_->n = n;
  impl_->k = k;
  impl_->weights = op.helmholtz().weights();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * n * k));
  for (int c = 0; c < a.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(a, c); it; ++it)
      entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  const SparseMatrix& K = op.helmholtz().stiffness();
  for (int i = 0; i < k; ++i) {
    const Vector kphi = K * basis.phi[static_cast<std::size_t>(i)].data;
    for (int r = 0; r < n; ++r) {
      if (kphi[r] == 0.0) continue;
      entries.emplace_back(r, n + i, kphi[r]);
      entries.emplace_back(n + i, r, kphi[r]);
    }
  }
  impl_->matrix.resize(n + k, n + k);
  impl_->matrix.setFromTriplets(entries.begin(), entries.end());
  impl_->matrix.makeCompressed();
  impl_->lu.compute(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success)
    throw NumericalError("bordered system is singular: near-kernel misidentified");
}

BorderedSolver::~BorderedSolver() = default;

BorderedSolver::Result BorderedSolver::solve(const Vector& g) const {
  const int n = impl_->n;
  const int k = impl_->k;
  Vector rhs = Vector::Zero(n + k);
  rhs.head(n) = impl_->weights.cwiseProduct(g);
  Vector x = impl_->lu.solve(rhs);
  // One step of iterative refinement.
  Vector r = rhs - impl_->matrix * x;
  x += impl_->lu.solve(r);
  r = rhs - impl_->matrix * x;
  Result out;
  out.v = x.head(n);
  for (int i = 0; i < k; ++i) out.multipliers.push_back(x[n + i]);
  const double scale = rhs.norm();
  out.relative_residual = scale > 0.0 ? r.norm() / scale : r.norm();
  return out;
}

GridField reduction_rhs(const AnsatzBundle& bundle, const GridField& v, ResidualMode mode) {
  const double p = bundle.exponent();
  GridField h = mode == ResidualMode::Algebraic ? bundle.interaction_residual
                                                : residual_via_operator(bundle);
  h.data = -h.data;
  for (Eigen::Index n = 0; n < h.data.size(); ++n)
    h.data[n] += superlinear_remainder(bundle.ubar.data[n], v.data[n], p);
  return h;
}

ReductionState solve_correction(const AnsatzBundle& bundle, const NearKernelBasis& basis,
                                double tol, const ReductionOptions& options) {
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  if (basis.k() != bundle.config.k())
    throw ConfigError("near-kernel basis size differs from the peak count");
  const LinearizedOperator op(bundle);
  const BorderedSolver solver(op, basis);

  ReductionState st;
  st.bundle = bundle;
  st.basis = basis;
  st.delta.assign(static_cast<std::size_t>(basis.k()), 0.0);
  GridField v(bundle.grid);
  int growth = 0;
  double last_increment = INFINITY;
  bool converged = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const GridField h = reduction_rhs(bundle, v, options.mode);
    BorderedSolver::Result r = solver.solve(h.data);
    const double increment = (r.v - v.data).cwiseAbs().maxCoeff();
    v.data = std::move(r.v);
    st.multipliers = std::move(r.multipliers);
    st.constrained_residual = r.relative_residual;
    st.increments.push_back(increment);
    st.iterations = it;
    if (increment <= tol * v.sup_norm()) {
      converged = true;
      break;
    }
    growth = increment > last_increment ? growth + 1 : 0;
    if (growth >= 3) {
      std::ostringstream msg;
      msg << "correction fixed point diverges (σ̲ = " << bundle.config.sigma_min()
          << " too small for the contraction)";
      throw NumericalError(msg.str());
    }
    last_increment = increment;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "correction fixed point did not converge in " << options.max_iterations
        << " iterations (last increment " << st.increments.back() << ")";
    throw NumericalError(msg.str());
  }
  st.correction = v;
  st.v_sup = v.sup_norm();
  st.v_h1 = h1_norm(v);
  const Helmholtz hm(bundle.grid);
  for (const GridField& phi : basis.phi) {
    const double dot = std::abs(v.data.dot(hm.stiffness() * phi.data));
    const double norm_phi = std::sqrt(phi.data.dot(hm.stiffness() * phi.data));
    if (st.v_h1 > 0.0)
      st.max_orthogonality = std::max(st.max_orthogonality, dot / (st.v_h1 * norm_phi));
  }
  st.d_coeffs = split_projection(reduction_rhs(bundle, v, options.mode), basis).d;
  GridField minus_m = options.mode == ResidualMode::Algebraic ? bundle.interaction_residual
                                                              : residual_via_operator(bundle);
  minus_m.data = -minus_m.data;
  st.d_leading = split_projection(minus_m, basis).d;
  return st;
}

double interaction_d(const AnsatzBundle& bundle, const NearKernelBasis& basis, int i) {
  const int k = bundle.config.k();
  if (k < 2) throw ConfigError("interaction coefficients need k >= 2");
  if (i < 0 || i >= k) throw ConfigError("peak index out of range");
  const StripGrid& g = bundle.grid;
  const GroundStateProfile& prof = *bundle.profile;
  const double p = bundle.exponent();
  const double T = g.period();
  const double pos = bundle.config.position(i);
  const Helmholtz hm(g);
  const Vector& phi = basis.phi[static_cast<std::size_t>(i)].data;
  const double norm2 = phi.dot(hm.stiffness() * phi);
  double sum = 0.0;
  for (int a = 0; a < g.nodes_x1; ++a) {
    const double dx = std::remainder(g.x1(a) - pos, T);
    for (int b = 0; b < g.nodes_xp; ++b) {
      const int node = g.index(a, b);
      if (bundle.cell_labels[static_cast<std::size_t>(node)] != i) continue;
      const double r = std::hypot(dx, g.x2(b));
      const double u = prof.value(r);
      if (u == 0.0) continue;
      const double du = r > 0.0 ? prof.derivative(r) * dx / r : 0.0;
      double others = 0.0;
      for (int j = 0; j < k; ++j)
        if (j != i) others += bundle.peak_fields[static_cast<std::size_t>(j)].data[node];
      sum += g.weight(b) * std::pow(u, p - 1.0) * others * du;
    }
  }
  return p * basis.alpha[static_cast<std::size_t>(i)] * sum / norm2;
}

double interaction_scale(double sigma_min) {
  return std::exp(-2.0 * sigma_min) / std::sqrt(sigma_min);
}

std::vector<double> projection_coefficients(const PeakConfiguration& config,
                                            std::shared_ptr<const GroundStateProfile> profile,
                                            const StripGrid& grid, const EquilibrateOptions& options) {
  const AnsatzBundle bundle = build_ansatz(config, std::move(profile), grid);
  const int k = config.k();
  const int count = options.eigen_count > 0 ? options.eigen_count : 2 * k + 2;
  const NearKernelRun run = compute_near_kernel(bundle, count, options.eigen_tol);
  std::vector<double> d;
  if (options.map == DMap::Interaction) {
    for (int i = 0; i < k; ++i) d.push_back(interaction_d(bundle, run.basis, i));
    return d;
  }
  GridField minus_m = bundle.interaction_residual;
  minus_m.data = -minus_m.data;
  return split_projection(minus_m, run.basis).d;
}

namespace {

double norm_of(const std::vector<double>& d) {
  double s = 0.0;
  for (double x : d) s += x * x;
  return std::sqrt(s);
}

double max_abs(const std::vector<double>& d) {
  double m = 0.0;
  for (double x : d) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

EquilibrateResult equilibrate(const PeakConfiguration& initial,
                              std::shared_ptr<const GroundStateProfile> profile,
                              const StripGrid& grid, const EquilibrateOptions& options) {
  const int k = initial.k();
  if (k < 2) throw ConfigError("equilibrate needs k >= 2");
  if (!(options.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (!(options.fd_step > 0.0)) throw ConfigError("finite-difference step must be > 0");

  EquilibrateResult res;
  auto evaluate = [&](const PeakConfiguration& c) {
    ++res.evaluations;
    return projection_coefficients(c, profile, grid, options);
  };
  PeakConfiguration config = initial;
  std::vector<double> d = evaluate(config);
  res.d_trace.push_back(d);
  res.position_trace.push_back(config.positions());

  for (int it = 0;; ++it) {
    const double target = options.tol * interaction_scale(config.sigma_min());
    if (max_abs(d) <= target) break;
    if (it >= options.max_iterations) {
      std::ostringstream msg;
      msg << "equilibrate did not converge in " << options.max_iterations
          << " Newton steps (max |d| = " << max_abs(d) << ", target " << target << ")";
      throw NumericalError(msg.str());
    }
    const std::vector<double> x0 = config.positions();
    Eigen::MatrixXd jac(k, k - 1);
    for (int c = 1; c < k; ++c) {
      std::vector<double> x = x0;
      x[static_cast<std::size_t>(c)] += options.fd_step;
      const std::vector<double> dc =
          evaluate(PeakConfiguration::from_positions(config.epsilon, x));
      for (int r = 0; r < k; ++r)
        jac(r, c - 1) = (dc[static_cast<std::size_t>(r)] - d[static_cast<std::size_t>(r)]) /
                        options.fd_step;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv.minCoeff() > 1e-12 * sv.maxCoeff())) {
      std::ostringstream msg;
      msg << "equilibrate Jacobian is singular beyond the translation mode (singular values "
          << sv.transpose() << ")";
      throw NumericalError(msg.str());
    }
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(d.data(), k);
    const Eigen::VectorXd step = -svd.solve(rhs);

    const double base = norm_of(d);
    bool accepted = false;
    double scale = 1.0;
    for (int halving = 0; halving < 30; ++halving, scale *= 0.5) {
      std::vector<double> x = x0;
      for (int c = 1; c < k; ++c) x[static_cast<std::size_t>(c)] += scale * step[c - 1];
      PeakConfiguration trial;
      try {
        trial = PeakConfiguration::from_positions(config.epsilon, x);
      } catch (const ConfigError&) {
        continue;
      }
      // The pinned peak must stay first after wrapping.
      if (std::abs(trial.position(0) - x0[0]) > 1e-9 * std::abs(trial.period())) continue;
      std::vector<double> dt = evaluate(trial);
      if (norm_of(dt) < base) {
        config = trial;
        d = std::move(dt);
        accepted = true;
        break;
      }
    }
    if (!accepted) throw NumericalError("equilibrate line search failed");
    ++res.newton_steps;
    res.d_trace.push_back(d);
    res.position_trace.push_back(config.positions());
  }
  res.config = config;
  res.d = d;
  return res;
}

}  // namespace multibump
