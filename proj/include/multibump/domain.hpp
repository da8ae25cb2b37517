#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace multibump {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Uniform grid on the periodic strip (S^1/ε) × R, N = 2.
///
/// x1 is periodic with period 2π/ε and nodes x1_i = -π/ε + i h1,
/// i = 0..nodes_x1-1. Only the half line x2 >= 0 is stored: functions are even
/// in x2 (radial in x'), node j sits at x2 = j h2, j = 0..nodes_xp-1, and the
/// homogeneous Dirichlet row is x2 = R = nodes_xp h2. Quadrature weights count
/// both halves of the strip.
struct StripGrid {
  double epsilon = 1.0;
  double transverse_extent = 14.0;
  int nodes_x1 = 0;
  int nodes_xp = 0;

  /// Smallest grid with spacings <= max_spacing whose node count along x1 is a
  /// multiple of x1_multiple. Throws ConfigError on invalid parameters.
  static StripGrid make(double epsilon, double transverse_extent, double max_spacing = 0.2,
                        int x1_multiple = 1);

  double period() const { return 2.0 * M_PI / epsilon; }
  double h1() const { return period() / nodes_x1; }
  double h2() const { return transverse_extent / nodes_xp; }
  int size() const { return nodes_x1 * nodes_xp; }
  int index(int i, int j) const { return i * nodes_xp + j; }
  double x1(int i) const { return -M_PI / epsilon + i * h1(); }
  double x2(int j) const { return j * h2(); }
  /// Trapezoidal weight of node (., j) for the full strip.
  double weight(int j) const { return h1() * h2() * (j == 0 ? 1.0 : 2.0); }
  /// Wraps an x1 index modulo nodes_x1.
  int wrap(int i) const { return ((i % nodes_x1) + nodes_x1) % nodes_x1; }

  bool operator==(const StripGrid&) const = default;
};

/// A scalar field sampled on a StripGrid.
struct GridField {
  StripGrid grid;
  Vector data;

  GridField() = default;
  explicit GridField(const StripGrid& g) : grid(g), data(Vector::Zero(g.size())) {}
  GridField(const StripGrid& g, Vector values);

  double& operator()(int i, int j) { return data[grid.index(i, j)]; }
  double operator()(int i, int j) const { return data[grid.index(i, j)]; }

  double sup_norm() const { return data.size() ? data.cwiseAbs().maxCoeff() : 0.0; }
  bool finite() const { return data.allFinite(); }
};

/// Samples f(x1, x2) at every node.
template <typename F>
GridField sample(const StripGrid& grid, F&& f) {
  GridField out(grid);
  for (int i = 0; i < grid.nodes_x1; ++i)
    for (int j = 0; j < grid.nodes_xp; ++j) out(i, j) = f(grid.x1(i), grid.x2(j));
  return out;
}

/// Discrete -Δ + 1 (five-point stencil, periodic in x1, even reflection at
/// x2 = 0, Dirichlet at x2 = R) together with the quadrature weights W.
///
/// The weighted stiffness K = W A is symmetric positive definite, so
/// <u, w>_{H1} = uᵀ K w and <u, w>_{L2} = uᵀ W w are consistent with the
/// operator: <A u, w>_{L2} = <u, w>_{H1}.
class Helmholtz {
 public:
  explicit Helmholtz(const StripGrid& grid);

  const StripGrid& grid() const { return grid_; }
  /// K = W A, symmetric positive definite.
  const SparseMatrix& stiffness() const { return stiffness_; }
  const Vector& weights() const { return weights_; }

  /// A u (unweighted).
  Vector apply(const Vector& u) const;

 private:
  StripGrid grid_;
  Vector weights_;
  SparseMatrix stiffness_;
};

GridField apply_helmholtz(const GridField& field);

struct HelmholtzSolveInfo {
  double relative_residual = 0.0;
  int iterations = 0;
};

/// Solves (-Δ + 1) u = rhs by preconditioned conjugate gradients on K u = W rhs
/// until ‖A u - rhs‖₂ / ‖rhs‖₂ < tol. Throws NumericalError (with the achieved
/// residual) if the iteration cap is reached.
GridField solve_helmholtz(const GridField& rhs, double tol, HelmholtzSolveInfo* info = nullptr);

struct InnerProducts {
  double l2 = 0.0;
  double h1 = 0.0;
};

/// L² and H¹ products by trapezoidal quadrature. Throws ConfigError when the
/// two fields live on different grids.
InnerProducts inner_products(const GridField& u, const GridField& w);

double l2_product(const GridField& u, const GridField& w);
double h1_product(const GridField& u, const GridField& w);
double l2_norm(const GridField& u);
double h1_norm(const GridField& u);

/// |∇u| by centred differences (one-sided zero at x2 = 0 by evenness, the
/// Dirichlet row beyond x2 = R).
GridField gradient_magnitude(const GridField& u);

/// Flat binary format: 8-byte magic "MBFIELD1", int32 nodes_x1, int32
/// nodes_xp, float64 epsilon, float64 transverse_extent, then nodes_x1 *
/// nodes_xp float64 values in index order (x2 fastest), little endian.
void write_field_binary(const GridField& field, std::ostream& out);
GridField read_field_binary(std::istream& in);
/// CSV with header "x1,x2,value", one row per node.
void write_field_csv(const GridField& field, std::ostream& out);

}  // namespace multibump
