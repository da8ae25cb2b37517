#include "multibump/groundstate.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "multibump/error.hpp"

namespace multibump {
namespace {

namespace odeint = boost::numeric::odeint;

using Real = long double;
using State = std::array<Real, 2>;

struct RadialRhs {
  Real dim;
  Real p;
  void operator()(const State& y, State& dy, Real r) const {
    const Real u = y[0];
    const Real up = u > 0 ? std::pow(u, p) : Real(0);
    dy[0] = y[1];
    dy[1] = -(dim - 1) / r * y[1] + u - up;
  }
};

using Stepper = odeint::runge_kutta_fehlberg78<State, Real, State, Real>;

auto make_stepper() {
  return odeint::make_controlled<Stepper>(Real(1e-22), Real(1e-18));
}

constexpr Real kSeriesStart = 1e-3L;

// U0 + c2 r^2 + c4 r^4, exact to O(r^6) for the regular solution.
State series_start(Real u0, Real dim, Real p) {
  const Real f = u0 - std::pow(u0, p);
  const Real fprime = 1 - p * std::pow(u0, p - 1);
  const Real c2 = f / (2 * dim);
  const Real c4 = fprime * c2 / (4 * (dim + 2));
  const Real r = kSeriesStart;
  return {u0 + c2 * r * r + c4 * r * r * r * r, 2 * c2 * r + 4 * c4 * r * r * r};
}

enum class Shot { kTurnsUp, kCrossesZero, kDecays };

Shot shoot(Real u0, const RadialRhs& rhs, Real r_limit) {
  auto stepper = make_stepper();
  State y = series_start(u0, rhs.dim, rhs.p);
  Real r = kSeriesStart;
  Real dt = 1e-3L;
  while (r < r_limit) {
    while (stepper.try_step(rhs, y, r, dt) == odeint::fail) {
    }
    if (y[0] < 0) return Shot::kCrossesZero;
    if (y[1] > 0) return Shot::kTurnsUp;
    if (y[0] < 1e-12L) return Shot::kDecays;
  }
  return Shot::kDecays;
}

// r^{-nu} K_nu(r) and its derivative -r^{-nu} K_{nu+1}(r), nu = (N-2)/2.
double bessel_tail(int dim, double r) {
  const double nu = 0.5 * (dim - 2);
  if (r > 700.0) return 0.0;
  return std::pow(r, -nu) * std::cyl_bessel_k(std::abs(nu), r);
}

double bessel_tail_derivative(int dim, double r) {
  const double nu = 0.5 * (dim - 2);
  if (r > 700.0) return 0.0;
  return -std::pow(r, -nu) * std::cyl_bessel_k(std::abs(nu + 1.0), r);
}

double hermite(double h, double t, double y0, double y1, double d0, double d1) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

double second_derivative(const GroundStateProfile& g, double r, double u, double du) {
  const double N = g.dimension;
  const double up = u > 0 ? std::pow(u, g.exponent) : 0.0;
  if (r == 0.0) return (u - up) / N;
  return -(N - 1) / r * du + u - up;
}

}  // namespace

bool exponent_is_admissible(int dimension, double exponent) {
  if (!(exponent >= 2.0) || !std::isfinite(exponent)) return false;
  if (dimension >= 3) return exponent < (dimension + 2.0) / (dimension - 2.0);
  return true;
}

GroundStateProfile solve_ground_state(int dimension, double exponent, double tol,
                                      const GroundStateOptions& options) {
  if (dimension < 1) throw ConfigError("dimension N must satisfy N >= 1");
  if (!(exponent >= 2.0)) throw ConfigError("exponent must satisfy p >= 2");
  if (!exponent_is_admissible(dimension, exponent)) {
    std::ostringstream msg;
    msg << "exponent p = " << exponent << " is supercritical: need p < (N+2)/(N-2) = "
        << (dimension + 2.0) / (dimension - 2.0);
    throw ConfigError(msg.str());
  }
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  if (!(options.grid_spacing > 0.0) || options.max_radius <= options.tail_match_radius)
    throw ConfigError("ground-state grid must extend beyond tail_match_radius");

  const RadialRhs rhs{Real(dimension), Real(exponent)};
  const Real r_limit = 60;

  // Bracket U(0): just above the equilibrium 1 the trajectory turns back up;
  // large enough values cross zero.
  Real lo = 1 + 1e-6L;
  if (shoot(lo, rhs, r_limit) != Shot::kTurnsUp)
    throw NumericalError("shooting: lower bracket U(0) = 1 + 1e-6 does not turn back up");
  Real hi = 2;
  for (;;) {
    const Shot s = shoot(hi, rhs, r_limit);
    if (s == Shot::kCrossesZero) break;
    if (s == Shot::kTurnsUp) lo = hi;
    hi *= 2;
    if (hi > 1e6L) {
      std::ostringstream msg;
      msg << "shooting: no zero-crossing bracket found, bracket [" << static_cast<double>(lo)
          << ", " << static_cast<double>(hi) << "]";
      throw NumericalError(msg.str());
    }
  }
  const Real stop_width = 8 * std::numeric_limits<Real>::epsilon() * hi;
  for (int it = 0; it < 400 && hi - lo > stop_width; ++it) {
    const Real mid = 0.5L * (lo + hi);
    const Shot s = shoot(mid, rhs, r_limit);
    if (s == Shot::kTurnsUp) {
      lo = mid;
    } else if (s == Shot::kCrossesZero) {
      hi = mid;
    } else {
      lo = hi = mid;
    }
  }
  if (hi - lo > stop_width || hi - lo > tol) {
    std::ostringstream msg;
    msg << "shooting: bracket did not converge, [" << static_cast<double>(lo) << ", "
        << static_cast<double>(hi) << "]";
    throw NumericalError(msg.str());
  }
  const Real u0 = 0.5L * (lo + hi);

  GroundStateProfile g;
  g.dimension = dimension;
  g.exponent = exponent;
  g.tail_match_radius = options.tail_match_radius;
  g.bracket_low = static_cast<double>(lo);
  g.bracket_high = static_cast<double>(hi);
  g.center_value = static_cast<double>(u0);

  const double h = options.grid_spacing;
  const auto n = static_cast<std::size_t>(std::llround(options.max_radius / h)) + 1;
  g.radius.resize(n);
  for (std::size_t j = 0; j < n; ++j) g.radius[j] = h * static_cast<double>(j);
  std::vector<Real> u(n, 0), du(n, 0);

  // Outward from the series start until U has decayed to 1e-4 U(0); past that
  // point the residual growing mode of the shot would dominate.
  auto stepper = make_stepper();
  State y = series_start(u0, rhs.dim, rhs.p);
  u[0] = u0;
  du[0] = 0;
  Real r = kSeriesStart;
  std::size_t join = 0;
  const Real join_level = 1e-4L * u0;
  for (std::size_t j = 1; j < n; ++j) {
    Real dt = 1e-3L;
    odeint::integrate_adaptive(stepper, rhs, y, r, Real(g.radius[j]), dt);
    r = g.radius[j];
    u[j] = y[0];
    du[j] = y[1];
    if (y[0] <= 0 || y[1] >= 0)
      throw NumericalError("shooting: outward trajectory lost monotone decay before the tail");
    if (y[0] < join_level) {
      join = j;
      break;
    }
  }
  if (join == 0 || join + 4 >= n)
    throw NumericalError("shooting: profile did not decay inside the radial grid");

  // Inward from max_radius along the decaying branch c r^{-nu} K_nu(r),
  // with c fixed by matching U at the join node.
  const double r_join = g.radius[join];
  double amplitude = static_cast<double>(u[join]) / bessel_tail(dimension, r_join);
  std::vector<Real> u_in(n, 0), du_in(n, 0);
  for (int pass = 0; pass < 4; ++pass) {
    const double r_end = g.radius[n - 1];
    State z{Real(amplitude * bessel_tail(dimension, r_end)),
            Real(amplitude * bessel_tail_derivative(dimension, r_end))};
    u_in[n - 1] = z[0];
    du_in[n - 1] = z[1];
    Real rr = r_end;
    for (std::size_t j = n - 1; j-- > join;) {
      Real dt = -1e-3L;
      odeint::integrate_adaptive(stepper, rhs, z, rr, Real(g.radius[j]), dt);
      rr = g.radius[j];
      u_in[j] = z[0];
      du_in[j] = z[1];
    }
    amplitude *= static_cast<double>(u[join] / u_in[join]);
  }
  for (std::size_t j = join + 1; j < n; ++j) {
    u[j] = u_in[j];
    du[j] = du_in[j];
  }

  g.values.resize(n);
  g.derivatives.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    g.values[j] = static_cast<double>(u[j]);
    g.derivatives[j] = static_cast<double>(du[j]);
  }
  g.tail_amplitude = amplitude;
  g.tail_L0 = amplitude * std::sqrt(M_PI / 2.0);
  g.tail_L1 = g.tail_L0;

  // Tenth-order centred difference of U' (odd extension through r = 0).
  auto du_at = [&](std::ptrdiff_t j) {
    return j < 0 ? -g.derivatives[static_cast<std::size_t>(-j)]
                 : g.derivatives[static_cast<std::size_t>(j)];
  };
  constexpr std::array<double, 5> kStencil{5.0 / 6.0, -5.0 / 21.0, 5.0 / 84.0, -5.0 / 504.0,
                                           1.0 / 1260.0};
  double worst = 0.0;
  const double N = dimension;
  for (std::size_t j = 1; j + 5 < n; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    double upp = 0.0;
    for (std::ptrdiff_t k = 1; k <= 5; ++k)
      upp += kStencil[static_cast<std::size_t>(k - 1)] * (du_at(jj + k) - du_at(jj - k));
    upp /= h;
    const double uj = g.values[j];
    const double res = upp + (N - 1) / g.radius[j] * g.derivatives[j] - uj +
                       std::pow(std::max(uj, 0.0), exponent);
    worst = std::max(worst, std::abs(res));
  }
  g.ode_residual = worst;
  if (!(worst < tol)) {
    std::ostringstream msg;
    msg << "ground state ODE residual " << worst << " exceeds tol " << tol;
    throw NumericalError(msg.str());
  }
  return g;
}

double GroundStateProfile::value(double r) const {
  r = std::abs(r);
  if (r > tail_match_radius) {
    const double v = tail_amplitude * bessel_tail(dimension, r);
    return v < 1e-300 ? 0.0 : v;
  }
  const double h = spacing();
  auto j = static_cast<std::size_t>(r / h);
  if (j + 1 >= radius.size()) j = radius.size() - 2;
  const double t = (r - radius[j]) / h;
  return hermite(h, t, values[j], values[j + 1], derivatives[j], derivatives[j + 1]);
}

double GroundStateProfile::derivative(double r) const {
  r = std::abs(r);
  if (r > tail_match_radius) {
    const double v = tail_amplitude * bessel_tail_derivative(dimension, r);
    return std::abs(v) < 1e-300 ? 0.0 : v;
  }
  const double h = spacing();
  auto j = static_cast<std::size_t>(r / h);
  if (j + 1 >= radius.size()) j = radius.size() - 2;
  const double t = (r - radius[j]) / h;
  const double s0 = second_derivative(*this, radius[j], values[j], derivatives[j]);
  const double s1 = second_derivative(*this, radius[j + 1], values[j + 1], derivatives[j + 1]);
  return hermite(h, t, derivatives[j], derivatives[j + 1], s0, s1);
}

double GroundStateProfile::operator()(std::span<const double> point) const {
  double s = 0.0;
  for (double x : point) s += x * x;
  return value(std::sqrt(s));
}

double eval_ground_state(const GroundStateProfile& profile, std::span<const double> point) {
  return profile(point);
}

TailFit fit_tail_constants(const GroundStateProfile& profile, double r_lo, double r_hi) {
  if (!(r_lo < r_hi) || r_lo < 0 || r_hi > profile.max_radius())
    throw ConfigError("tail window must satisfy 0 <= r_lo < r_hi <= grid extent");
  if (!(profile.value(r_lo) < 1e-2))
    throw ConfigError("tail window must start where U(r_lo) < 1e-2");

  const double half_power = 0.5 * (profile.dimension - 1);
  double s0 = 0, s1 = 0, min0 = INFINITY, max0 = -INFINITY, min1 = INFINITY, max1 = -INFINITY;
  int count = 0;
  for (std::size_t j = 0; j < profile.radius.size(); ++j) {
    const double r = profile.radius[j];
    if (r < r_lo || r > r_hi) continue;
    const double scale = std::pow(r, half_power) * std::exp(r);
    const double a = scale * profile.values[j];
    const double b = scale * std::abs(profile.derivatives[j]);
    s0 += a;
    s1 += b;
    min0 = std::min(min0, a);
    max0 = std::max(max0, a);
    min1 = std::min(min1, b);
    max1 = std::max(max1, b);
    ++count;
  }
  if (count < 2) throw ConfigError("tail window contains fewer than two grid nodes");
  TailFit fit;
  fit.L0 = s0 / count;
  fit.L1 = s1 / count;
  fit.spread_L0 = (max0 - min0) / fit.L0;
  fit.spread_L1 = (max1 - min1) / fit.L1;
  if (fit.spread_L0 > 0.05 || fit.spread_L1 > 0.05) {
    std::ostringstream msg;
    msg << "tail window spread " << std::max(fit.spread_L0, fit.spread_L1)
        << " exceeds 5%: tail not converged on [" << r_lo << ", " << r_hi << "]";
    throw NumericalError(msg.str());
  }
  return fit;
}

double radial_energy(const GroundStateProfile& g, std::size_t j) {
  const double u = g.values[j];
  const double du = g.derivatives[j];
  return 0.5 * du * du - 0.5 * u * u + std::pow(std::max(u, 0.0), g.exponent + 1) / (g.exponent + 1);
}

}  // namespace multibump
