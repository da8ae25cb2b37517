#include "multibump/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "multibump/error.hpp"

namespace multibump {

LinearizedOperator::LinearizedOperator(const StripGrid& grid, const Vector& ubar, double exponent)
    : helmholtz_(grid), potential_(grid.size()) {
  if (ubar.size() != grid.size()) throw ConfigError("field size does not match its grid");
  for (Eigen::Index n = 0; n < ubar.size(); ++n) {
    const double u = ubar[n];
    potential_[n] = u > 0.0 ? exponent * std::pow(u, exponent - 1.0) : 0.0;
  }
}

LinearizedOperator::LinearizedOperator(const AnsatzBundle& bundle)
    : LinearizedOperator(bundle.grid, bundle.ubar.data, bundle.exponent()) {}

Vector LinearizedOperator::apply(const Vector& u) const {
  return helmholtz_.apply(u) - potential_.cwiseProduct(u);
}

SparseMatrix LinearizedOperator::weighted_matrix() const {
  SparseMatrix m = helmholtz_.stiffness();
  const Vector& w = helmholtz_.weights();
  for (Eigen::Index n = 0; n < potential_.size(); ++n) m.coeffRef(n, n) -= w[n] * potential_[n];
  return m;
}

LinearizedOperator assemble_linearized(const AnsatzBundle& bundle) {
  return LinearizedOperator(bundle);
}

namespace {

using Matrix = Eigen::MatrixXd;

// Orthonormalizes the columns of block against basis (K-product) and within
// itself; drops columns that become negligible. Returns the kept columns.
Matrix k_orthonormalize(const SparseMatrix& K, const Matrix& basis, Matrix block) {
  for (int pass = 0; pass < 2; ++pass) {
    if (basis.cols() > 0) block -= basis * (basis.transpose() * (K * block));
  }
  Matrix kept(block.rows(), block.cols());
  int count = 0;
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    Vector v = block.col(c);
    const double before = std::sqrt(std::max(v.dot(K * v), 0.0));
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) v -= basis * (basis.transpose() * (K * v));
      if (count > 0) v -= kept.leftCols(count) * (kept.leftCols(count).transpose() * (K * v));
    }
    const double after = std::sqrt(std::max(v.dot(K * v), 0.0));
    if (after < 1e-10 * before) continue;
    kept.col(count++) = v / after;
  }
  return kept.leftCols(count);
}

Matrix seeded_block(Eigen::Index rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      m(r, c) = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
  return m;
}

void fix_sign(Vector& v) {
  Eigen::Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  if (v[at] < 0) v = -v;
}

}  // namespace

SpectralResult lowest_eigenpairs(const LinearizedOperator& op, int count, double tol,
                                 const EigenOptions& options) {
  if (count < 1) throw ConfigError("eigenpair count must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  const StripGrid& grid = op.grid();
  const Eigen::Index n = grid.size();
  if (count > n) throw ConfigError("more eigenpairs requested than grid nodes");
  const SparseMatrix& K = op.helmholtz().stiffness();
  const Vector p_diag = op.helmholtz().weights().cwiseProduct(op.potential());
  if (p_diag.maxCoeff() <= 0.0)
    throw NumericalError("potential vanishes: the pencil has the single eigenvalue 1");

  Eigen::SimplicialLLT<SparseMatrix> chol(K);
  if (chol.info() != Eigen::Success) throw NumericalError("Cholesky factorization of K failed");
  auto apply_t = [&](const Matrix& x) -> Matrix {
    Matrix px = p_diag.asDiagonal() * x;
    return chol.solve(px);
  };

  const int width = std::min<Eigen::Index>(count + 4, n);
  const int depth = std::max(options.krylov_depth, 2);
  Matrix start = k_orthonormalize(K, Matrix(n, 0), seeded_block(n, width, options.seed));

  SpectralResult result;
  std::vector<double> mu(static_cast<std::size_t>(count));
  Matrix ritz;
  std::vector<double> res(static_cast<std::size_t>(count), INFINITY);
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    Matrix basis = start;
    Matrix block = start;
    for (int d = 1; d < depth; ++d) {
      Matrix next = k_orthonormalize(K, basis, apply_t(block));
      if (next.cols() == 0) break;
      Matrix grown(n, basis.cols() + next.cols());
      grown << basis, next;
      basis.swap(grown);
      block = next;
    }
    const Matrix h = basis.transpose() * (p_diag.asDiagonal() * basis);
    Eigen::SelfAdjointEigenSolver<Matrix> small(0.5 * (h + h.transpose()));
    const Eigen::Index m = basis.cols();
    const int keep = static_cast<int>(std::min<Eigen::Index>(width, m));
    // Largest μ first.
    Matrix s(m, keep);
    for (int c = 0; c < keep; ++c) s.col(c) = small.eigenvectors().col(m - 1 - c);
    ritz = basis * s;
    const int wanted = std::min(count, keep);
    const Matrix t_ritz = apply_t(ritz.leftCols(wanted));
    bool converged = wanted == count;
    for (int c = 0; c < wanted; ++c) {
      mu[static_cast<std::size_t>(c)] = small.eigenvalues()[m - 1 - c];
      const Vector r = t_ritz.col(c) - mu[static_cast<std::size_t>(c)] * ritz.col(c);
      res[static_cast<std::size_t>(c)] = std::sqrt(std::max(r.dot(K * r), 0.0));
      if (!(res[static_cast<std::size_t>(c)] < tol)) converged = false;
    }
    result.restarts = restart;
    if (converged) break;
    if (restart == options.max_restarts) {
      std::ostringstream msg;
      msg << "eigen iteration did not converge after " << restart << " restarts; residuals:";
      for (double r : res) msg << ' ' << r;
      throw NumericalError(msg.str());
    }
    start = k_orthonormalize(K, Matrix(n, 0), ritz);
  }

  for (int c = 0; c < count; ++c) {
    Vector v = ritz.col(c);
    fix_sign(v);
    const double lambda = 1.0 - mu[static_cast<std::size_t>(c)];
    result.eigenvalues.push_back(lambda);
    result.eigenvectors.emplace_back(grid, std::move(v));
    result.residuals.push_back(res[static_cast<std::size_t>(c)]);
  }
  for (double l : result.eigenvalues)
    if (std::abs(l) < options.gap_threshold) ++result.near_kernel_count;
  return result;
}

void compute_overlaps(SpectralResult& result, const AnsatzBundle& bundle) {
  const int k = bundle.config.k();
  const Helmholtz op(bundle.grid);
  const SparseMatrix& K = op.stiffness();
  result.overlap_matrix.resize(static_cast<Eigen::Index>(result.eigenvectors.size()), k);
  for (int i = 0; i < k; ++i) {
    const Vector& t = bundle.translation_modes[static_cast<std::size_t>(i)].data;
    const Vector kt = K * t;
    const double norm = std::sqrt(t.dot(kt));
    for (std::size_t a = 0; a < result.eigenvectors.size(); ++a)
      result.overlap_matrix(static_cast<Eigen::Index>(a), i) =
          result.eigenvectors[a].data.dot(kt) / norm;
  }
}

std::vector<double> principal_angles(const std::vector<GridField>& a,
                                     const std::vector<GridField>& b) {
  if (a.empty() || b.empty()) return {};
  const StripGrid& grid = a.front().grid;
  const Helmholtz helmholtz(grid);
  const SparseMatrix& K = helmholtz.stiffness();
  auto stack = [&](const std::vector<GridField>& fields) {
    Matrix m(grid.size(), static_cast<Eigen::Index>(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!(fields[c].grid == grid)) throw ConfigError("fields live on different grids");
      m.col(static_cast<Eigen::Index>(c)) = fields[c].data;
    }
    return k_orthonormalize(K, Matrix(grid.size(), 0), m);
  };
  const Matrix qa = stack(a);
  const Matrix qb = stack(b);
  const Matrix c = qa.transpose() * (K * qb);
  Eigen::JacobiSVD<Matrix> svd(c);
  std::vector<double> angles;
  for (Eigen::Index n = 0; n < svd.singularValues().size(); ++n)
    angles.push_back(std::acos(std::clamp(svd.singularValues()[n], -1.0, 1.0)));
  std::sort(angles.begin(), angles.end());
  return angles;
}

NearKernelBasis near_kernel_basis(const SpectralResult& result, const AnsatzBundle& bundle,
                                  double gap_threshold) {
  const int k = bundle.config.k();
  std::vector<int> picked;
  for (std::size_t a = 0; a < result.eigenvalues.size(); ++a)
    if (std::abs(result.eigenvalues[a]) < gap_threshold) picked.push_back(static_cast<int>(a));
  if (static_cast<int>(picked.size()) != k) {
    std::ostringstream msg;
    msg << "near-kernel dimension " << picked.size() << " differs from the peak count " << k
        << "; eigenvalues:";
    for (double l : result.eigenvalues) msg << ' ' << l;
    throw NumericalError(msg.str());
  }
  const StripGrid& grid = bundle.grid;
  const Helmholtz helmholtz(grid);
  const SparseMatrix& K = helmholtz.stiffness();
  const Eigen::Index n = grid.size();
  Matrix phi(n, k);
  Matrix t(n, k);
  Vector t_norm(k);
  for (int c = 0; c < k; ++c) {
    phi.col(c) = result.eigenvectors[static_cast<std::size_t>(picked[static_cast<std::size_t>(c)])].data;
    t.col(c) = bundle.translation_modes[static_cast<std::size_t>(c)].data;
    t_norm[c] = std::sqrt(t.col(c).dot(K * t.col(c)));
  }
  const Matrix kt = K * t;
  const Matrix m = phi.transpose() * kt * t_norm.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix rotated = phi * (svd.matrixU() * svd.matrixV().transpose());

  NearKernelBasis basis;
  for (int c = 0; c < k; ++c) {
    Vector f = rotated.col(c);
    const double alpha = f.dot(kt.col(c)) / (t_norm[c] * t_norm[c]);
    const Vector diff = f - alpha * t.col(c);
    basis.alignment_residual.push_back(std::sqrt(std::max(diff.dot(K * diff), 0.0)));
    basis.alpha.push_back(alpha);
    basis.phi.emplace_back(grid, std::move(f));
    basis.eigenvalues.push_back(result.eigenvalues[static_cast<std::size_t>(picked[static_cast<std::size_t>(c)])]);
  }
  basis.principal_angles = principal_angles(basis.phi, bundle.translation_modes);
  return basis;
}

NearKernelRun compute_near_kernel(const AnsatzBundle& bundle, int count, double tol,
                                  const EigenOptions& options) {
  NearKernelRun run;
  run.spectrum = lowest_eigenpairs(LinearizedOperator(bundle), count, tol, options);
  compute_overlaps(run.spectrum, bundle);
  run.basis = near_kernel_basis(run.spectrum, bundle, options.gap_threshold);
  return run;
}

}  // namespace multibump
