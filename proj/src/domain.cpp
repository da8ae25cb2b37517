#include "multibump/domain.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <Eigen/IterativeLinearSolvers>

#include "multibump/error.hpp"

namespace multibump {

StripGrid StripGrid::make(double epsilon, double transverse_extent, double max_spacing,
                          int x1_multiple) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(transverse_extent > 0.0)) throw ConfigError("transverse extent R must be > 0");
  if (!(max_spacing > 0.0)) throw ConfigError("grid spacing must be > 0");
  if (x1_multiple < 1) throw ConfigError("x1 node multiple must be >= 1");
  StripGrid g;
  g.epsilon = epsilon;
  g.transverse_extent = transverse_extent;
  int n1 = static_cast<int>(std::ceil(g.period() / max_spacing - 1e-9));
  n1 = ((n1 + x1_multiple - 1) / x1_multiple) * x1_multiple;
  g.nodes_x1 = std::max(n1, 3);
  g.nodes_xp = std::max(static_cast<int>(std::ceil(transverse_extent / max_spacing - 1e-9)), 2);
  return g;
}

GridField::GridField(const StripGrid& g, Vector values) : grid(g), data(std::move(values)) {
  if (data.size() != g.size()) throw ConfigError("field size does not match its grid");
}

Helmholtz::Helmholtz(const StripGrid& grid) : grid_(grid), weights_(grid.size()) {
  const int n1 = grid.nodes_x1;
  const int n2 = grid.nodes_xp;
  const double c1 = 1.0 / (grid.h1() * grid.h1());
  const double c2 = 1.0 / (grid.h2() * grid.h2());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(grid.size()) * 5);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const int row = grid.index(i, j);
      const double w = grid.weight(j);
      weights_[row] = w;
      entries.emplace_back(row, row, w * (1.0 + 2.0 * c1 + 2.0 * c2));
      entries.emplace_back(row, grid.index(grid.wrap(i + 1), j), -w * c1);
      entries.emplace_back(row, grid.index(grid.wrap(i - 1), j), -w * c1);
      if (j == 0) {
        entries.emplace_back(row, grid.index(i, 1), -2.0 * w * c2);
      } else {
        entries.emplace_back(row, grid.index(i, j - 1), -w * c2);
        if (j + 1 < n2) entries.emplace_back(row, grid.index(i, j + 1), -w * c2);
      }
    }
  }
  stiffness_.resize(grid.size(), grid.size());
  stiffness_.setFromTriplets(entries.begin(), entries.end());
}

Vector Helmholtz::apply(const Vector& u) const {
  const StripGrid& g = grid_;
  const int n2 = g.nodes_xp;
  const double c1 = 1.0 / (g.h1() * g.h1());
  const double c2 = 1.0 / (g.h2() * g.h2());
  Vector out(u.size());
  for (int i = 0; i < g.nodes_x1; ++i) {
    const int ip = g.wrap(i + 1) * n2;
    const int im = g.wrap(i - 1) * n2;
    const int ic = i * n2;
    for (int j = 0; j < n2; ++j) {
      const double below = j == 0 ? u[ic + 1] : u[ic + j - 1];
      const double above = j + 1 < n2 ? u[ic + j + 1] : 0.0;
      out[ic + j] = u[ic + j] * (1.0 + 2.0 * c1 + 2.0 * c2) - c1 * (u[ip + j] + u[im + j]) -
                    c2 * (below + above);
    }
  }
  return out;
}

GridField apply_helmholtz(const GridField& field) {
  return GridField(field.grid, Helmholtz(field.grid).apply(field.data));
}

GridField solve_helmholtz(const GridField& rhs, double tol, HelmholtzSolveInfo* info) {
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  const Helmholtz op(rhs.grid);
  const double rhs_norm = rhs.data.norm();
  if (rhs_norm == 0.0) {
    if (info) *info = {};
    return GridField(rhs.grid);
  }
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.compute(op.stiffness());
  cg.setMaxIterations(20 * rhs.grid.size());
  const Vector b = op.weights().cwiseProduct(rhs.data);
  Vector u = Vector::Zero(rhs.data.size());
  double cg_tol = 0.1 * tol;
  double achieved = INFINITY;
  int iterations = 0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    cg.setTolerance(cg_tol);
    u = cg.solveWithGuess(b, u);
    iterations += static_cast<int>(cg.iterations());
    achieved = (op.apply(u) - rhs.data).norm() / rhs_norm;
    if (achieved < tol) break;
    if (cg.info() == Eigen::NoConvergence) break;
    cg_tol *= 0.1;
  }
  if (info) *info = {achieved, iterations};
  if (!(achieved < tol)) {
    std::ostringstream msg;
    msg << "Helmholtz solve stopped at relative residual " << achieved << " (tol " << tol << ")";
    throw NumericalError(msg.str());
  }
  return GridField(rhs.grid, std::move(u));
}

namespace {
void require_same_grid(const GridField& u, const GridField& w) {
  if (!(u.grid == w.grid)) throw ConfigError("fields live on different grids");
}
}  // namespace

double l2_product(const GridField& u, const GridField& w) {
  require_same_grid(u, w);
  double s = 0.0;
  for (int i = 0; i < u.grid.nodes_x1; ++i)
    for (int j = 0; j < u.grid.nodes_xp; ++j) s += u.grid.weight(j) * u(i, j) * w(i, j);
  return s;
}

double h1_product(const GridField& u, const GridField& w) {
  require_same_grid(u, w);
  const Vector au = Helmholtz(u.grid).apply(u.data);
  return l2_product(GridField(u.grid, au), w);
}

InnerProducts inner_products(const GridField& u, const GridField& w) {
  return {l2_product(u, w), h1_product(u, w)};
}

double l2_norm(const GridField& u) { return std::sqrt(std::max(l2_product(u, u), 0.0)); }
double h1_norm(const GridField& u) { return std::sqrt(std::max(h1_product(u, u), 0.0)); }

GridField gradient_magnitude(const GridField& u) {
  const StripGrid& g = u.grid;
  GridField out(g);
  const double h1 = g.h1();
  const double h2 = g.h2();
  for (int i = 0; i < g.nodes_x1; ++i) {
    for (int j = 0; j < g.nodes_xp; ++j) {
      const double d1 = (u(g.wrap(i + 1), j) - u(g.wrap(i - 1), j)) / (2 * h1);
      double d2 = 0.0;
      if (j > 0) {
        const double above = j + 1 < g.nodes_xp ? u(i, j + 1) : 0.0;
        d2 = (above - u(i, j - 1)) / (2 * h2);
      }
      out(i, j) = std::hypot(d1, d2);
    }
  }
  return out;
}

namespace {
constexpr std::array<char, 8> kMagic{'M', 'B', 'F', 'I', 'E', 'L', 'D', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ConfigError("truncated field file");
  return value;
}
}  // namespace

void write_field_binary(const GridField& field, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put<std::int32_t>(out, field.grid.nodes_x1);
  put<std::int32_t>(out, field.grid.nodes_xp);
  put<double>(out, field.grid.epsilon);
  put<double>(out, field.grid.transverse_extent);
  out.write(reinterpret_cast<const char*>(field.data.data()),
            static_cast<std::streamsize>(sizeof(double) * field.data.size()));
}

GridField read_field_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ConfigError("not a multibump field file");
  StripGrid g;
  g.nodes_x1 = get<std::int32_t>(in);
  g.nodes_xp = get<std::int32_t>(in);
  g.epsilon = get<double>(in);
  g.transverse_extent = get<double>(in);
  if (g.nodes_x1 <= 0 || g.nodes_xp <= 0 || !(g.epsilon > 0) || !(g.transverse_extent > 0))
    throw ConfigError("corrupt field header");
  Vector data(g.size());
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(sizeof(double) * data.size()));
  if (!in) throw ConfigError("truncated field file");
  return GridField(g, std::move(data));
}

void write_field_csv(const GridField& field, std::ostream& out) {
  const auto old = out.precision(17);
  out << "x1,x2,value\n";
  for (int i = 0; i < field.grid.nodes_x1; ++i)
    for (int j = 0; j < field.grid.nodes_xp; ++j)
      out << field.grid.x1(i) << ',' << field.grid.x2(j) << ',' << field(i, j) << '\n';
  out.precision(old);
}

}  // namespace multibump
