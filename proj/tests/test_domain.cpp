#include <cmath>
#include <sstream>

#include "doctest.h"
#include "multibump/domain.hpp"
#include "multibump/error.hpp"

using namespace multibump;

TEST_CASE("grid layout") {
  const StripGrid g = StripGrid::make(M_PI / 8.0, 14.0, 0.2, 1);
  CHECK(g.nodes_x1 == 80);
  CHECK(g.nodes_xp == 70);
  CHECK(g.x1(0) == doctest::Approx(-8.0));
  CHECK(g.wrap(-1) == 79);
  const StripGrid g3 = StripGrid::make(0.3, 14.0, 0.2, 3);
  CHECK(g3.nodes_x1 % 3 == 0);
  CHECK(g3.h1() <= 0.2);
  CHECK_THROWS_AS(StripGrid::make(-1.0, 14.0, 0.2), ConfigError);
}

TEST_CASE("discrete symbol of the operator") {
  // cos(2π m x1 / T) cos((2n+1) π x2 / 2R) is an eigenvector of the stencil.
  const StripGrid g = StripGrid::make(0.5, 6.0, 0.25, 1);
  const int m = 3, n = 2;
  const double k1 = 2.0 * M_PI * m / g.period();
  const double th = (2 * n + 1) * M_PI / (2.0 * g.transverse_extent);
  const GridField u = sample(g, [&](double x1, double x2) { return std::cos(k1 * x1) * std::cos(th * x2); });
  const double h1 = g.h1(), h2 = g.h2();
  const double symbol = 1.0 + (2.0 - 2.0 * std::cos(k1 * h1)) / (h1 * h1) + (2.0 - 2.0 * std::cos(th * h2)) / (h2 * h2);
  const GridField au = apply_helmholtz(u);
  CHECK((au.data - symbol * u.data).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("weighted stiffness is symmetric and consistent") {
  const StripGrid g = StripGrid::make(0.4, 8.0, 0.3, 1);
  const GridField u = sample(g, [](double x1, double x2) { return std::exp(-0.1 * x1 * x1 - 0.2 * x2 * x2); });
  const GridField w = sample(g, [](double x1, double x2) { return std::cos(0.4 * x1) * std::exp(-0.3 * x2 * x2); });
  const InnerProducts uw = inner_products(u, w), wu = inner_products(w, u);
  CHECK(uw.h1 == doctest::Approx(wu.h1).epsilon(1e-13));
  CHECK(l2_product(apply_helmholtz(u), w) == doctest::Approx(uw.h1).epsilon(1e-12));
  CHECK(h1_norm(u) > l2_norm(u));
}

TEST_CASE("Helmholtz solve round trip") {
  const StripGrid g = StripGrid::make(0.4, 10.0, 0.25, 1);
  const GridField u = sample(g, [](double x1, double x2) { return std::cos(0.4 * x1) * std::exp(-0.25 * x2 * x2); });
  HelmholtzSolveInfo info;
  const GridField back = solve_helmholtz(apply_helmholtz(u), 1e-12, &info);
  CHECK((back.data - u.data).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(info.relative_residual < 1e-12);
}

TEST_CASE("second-order convergence on a manufactured solution") {
  const double eps = M_PI / 8.0;
  auto error = [&](double h) {
    const StripGrid g = StripGrid::make(eps, 14.0, h, 1);
    auto exact = [&](double x1, double x2) { return std::cos(eps * x1) * std::exp(-0.25 * x2 * x2); };
    const GridField rhs = sample(g, [&](double x1, double x2) { return exact(x1, x2) * (1.5 + eps * eps - 0.25 * x2 * x2); });
    return (solve_helmholtz(rhs, 1e-13).data - sample(g, exact).data).cwiseAbs().maxCoeff();
  };
  const double ratio = error(0.4) / error(0.2);
  CHECK(ratio > 3.6);
  CHECK(ratio < 4.4);
}

TEST_CASE("binary and CSV output") {
  const StripGrid g = StripGrid::make(0.5, 3.0, 0.5, 1);
  const GridField u = sample(g, [](double x1, double x2) { return x1 + 10.0 * x2; });
  std::stringstream bin;
  write_field_binary(u, bin);
  const GridField back = read_field_binary(bin);
  CHECK(back.grid == u.grid);
  CHECK(back.data == u.data);
  std::stringstream bad("NOTAFIELD");
  CHECK_THROWS(read_field_binary(bad));
  std::stringstream csv;
  write_field_csv(u, csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "x1,x2,value");
}
