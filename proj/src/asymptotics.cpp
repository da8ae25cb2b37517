#include "multibump/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "multibump/error.hpp"

namespace multibump {

namespace {

using Integrand = std::function<double(double, double)>;

constexpr unsigned kMaxDepth = 15;
constexpr double kInnerTol = 1e-11;
constexpr double kOuterTol = 1e-9;

double transverse_measure(int dimension, double rho) {
  switch (dimension) {
    case 2: return 2.0;
    case 3: return 2.0 * std::numbers::pi * rho;
    default: return 1.0;
  }
}

// ∫ h over {lo < x1 < hi} x R^{N-1}, split at the given breakpoints.
QuadratureResult integrate_region(const Integrand& h, int dimension, double lo, double hi,
                                  std::vector<double> breaks, double decay) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double rho_max = 40.0 / decay;
  double inner_error = 0.0;
  auto slice = [&](double x1) {
    if (dimension == 1) return h(x1, 0.0);
    double err = 0.0;
    const double v = GK::integrate(
        [&](double rho) { return h(x1, rho) * transverse_measure(dimension, rho); }, 0.0, rho_max,
        kMaxDepth, kInnerTol, &err);
    inner_error = std::max(inner_error, err);
    return v;
  };
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  QuadratureResult out;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double l = std::max(breaks[s], lo);
    const double r = std::min(breaks[s + 1], hi);
    if (!(r > l)) continue;
    double err = 0.0;
    out.value += GK::integrate(slice, l, r, kMaxDepth, kOuterTol, &err);
    out.error += err;
  }
  out.error += inner_error * (hi - lo);
  return out;
}

void validate(const InteractionSpec& spec) {
  if (spec.dimension < 1 || spec.dimension > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (!(spec.b > 0.0 && spec.a > spec.b)) throw ConfigError("need a > b > 0");
  if (!(spec.y0 > 0.0)) throw ConfigError("y0 must be > 0");
  if (!spec.f || !spec.g) throw ConfigError("f and g must be set");
}

double region_lo(CellKind cell, double decay) {
  return cell == CellKind::HalfCell ? 0.0 : -40.0 / decay;
}

void check_error(const QuadratureResult& q, const char* what) {
  if (!(q.error <= 0.01 * std::abs(q.value)) || !std::isfinite(q.value)) {
    std::ostringstream msg;
    msg << what << ": quadrature error " << q.error << " exceeds 1% of " << q.value;
    throw NumericalError(msg.str());
  }
}

}  // namespace

QuadratureResult interaction_quadrature(const InteractionSpec& spec) {
  validate(spec);
  const double decay = spec.a + spec.b;
  const double y0 = spec.y0;
  const double lo = region_lo(spec.cell, decay);
  const double hi = spec.cell == CellKind::WholeSpace ? y0 + 40.0 / decay : 0.5 * y0;
  const Integrand h = [&](double x1, double rho) {
    const double fv = std::abs(spec.f(x1, rho));
    const double gv = std::abs(spec.g(x1 - y0, rho));
    if (fv == 0.0 || gv == 0.0) return 0.0;
    return std::pow(fv, spec.a) * std::pow(gv, spec.b);
  };
  const QuadratureResult q = integrate_region(h, spec.dimension, lo, hi, {0.0, 0.5 * y0, y0}, decay);
  check_error(q, "interaction");
  return q;
}

InteractionSpec profile_interaction(const GroundStateProfile& profile, double a, double b, double y0,
                                    CellKind cell, bool use_derivative) {
  const GroundStateProfile* U = &profile;
  InteractionSpec spec;
  spec.dimension = profile.dimension;
  spec.a = a;
  spec.b = b;
  spec.y0 = y0;
  spec.cell = cell;
  spec.g = [U](double x1, double rho) { return U->value(std::hypot(x1, rho)); };
  if (use_derivative) {
    spec.f = [U](double x1, double rho) {
      const double r = std::hypot(x1, rho);
      return r > 0.0 ? std::abs(U->derivative(r)) * std::abs(x1) / r : 0.0;
    };
  } else {
    spec.f = spec.g;
  }
  return spec;
}

InteractionSpec exponential_interaction(double a, double b, double y0, CellKind cell) {
  InteractionSpec spec;
  spec.dimension = 1;
  spec.a = a;
  spec.b = b;
  spec.y0 = y0;
  spec.cell = cell;
  spec.f = [](double x1, double) { return std::exp(-std::abs(x1)); };
  spec.g = spec.f;
  return spec;
}

double exponential_interaction_exact(double a, double b, double y0) {
  if (!(b > 0.0 && a > b && y0 > 0.0)) throw ConfigError("need a > b > 0 and y0 > 0");
  const double eb = std::exp(-b * y0);
  return eb / (a + b) - eb * std::expm1(-(a - b) * y0) / (a - b) + std::exp(-a * y0) / (a + b);
}

InteractionLimit interaction_limit(InteractionSpec spec, const std::vector<double>& separations,
                                   double tail_L) {
  if (separations.size() < 2) throw ConfigError("need at least two separations");
  validate(spec);
  std::vector<double> ys = separations;
  std::sort(ys.begin(), ys.end());
  InteractionLimit out;
  out.tail_L = tail_L;
  const double t_exp = spec.b * 0.5 * (spec.dimension - 1);
  for (double y : ys) {
    spec.y0 = y;
    LimitPoint pt;
    pt.y0 = y;
    pt.value = interaction_quadrature(spec).value;
    pt.rescaled = pt.value * std::exp(spec.b * y) * std::pow(y, t_exp);
    out.points.push_back(pt);
  }
  const LimitPoint& p1 = out.points[out.points.size() - 2];
  const LimitPoint& p2 = out.points.back();
  out.extrapolated = (p2.y0 * p2.rescaled - p1.y0 * p1.rescaled) / (p2.y0 - p1.y0);

  const double decay = spec.a;
  const double lo = region_lo(spec.cell, decay);
  const double hi = 40.0 / (spec.a - spec.b);
  const auto& f = spec.f;
  const double a = spec.a, b = spec.b;
  const Integrand fa = [&](double x1, double rho) { return std::pow(std::abs(f(x1, rho)), a); };
  const Integrand fa_tilted = [&](double x1, double rho) {
    return std::pow(std::abs(f(x1, rho)), a) * std::exp(b * x1);
  };
  const QuadratureResult c0 = integrate_region(fa, spec.dimension, lo, hi, {0.0}, decay);
  check_error(c0, "C0");
  const QuadratureResult tilt =
      integrate_region(fa_tilted, spec.dimension, lo, hi, {0.0}, a - b);
  check_error(tilt, "tilted integral");
  out.C0 = c0.value;
  out.stated_limit = tail_L * c0.value;
  out.pointwise_limit = std::pow(tail_L, b) * tilt.value;
  for (std::size_t s = 1; s < out.points.size(); ++s) {
    const double prev = std::abs(out.points[s - 1].rescaled - out.pointwise_limit);
    const double cur = std::abs(out.points[s].rescaled - out.pointwise_limit);
    if (cur > prev) out.monotone = false;
  }
  return out;
}

double taylor_remainder_ratio(double a, double b, double p) {
  if (!(a > 0.0)) throw ConfigError("a must be > 0");
  if (b == 0.0) return 0.0;
  const int k = static_cast<int>(std::floor(p));
  const double s = a + b;
  if (p == static_cast<double>(k)) {
    // The Taylor polynomial is (a+b)^p itself.
    return s >= 0.0 ? 0.0 : std::pow(std::abs(s) / std::abs(b), p);
  }
  const double x = b / a;
  const double ax = std::abs(x);
  if (ax < 0.5) {
    // Σ_{m>k} C(p,m) x^m, geometric tail.
    double c = 1.0;
    for (int m = 1; m <= k; ++m) c *= (p - m + 1) / m;
    double term_coeff = c;
    double sum = 0.0;
    double xm = std::pow(x, k);
    for (int m = k + 1; m < 400; ++m) {
      term_coeff *= (p - m + 1) / m;
      xm *= x;
      const double term = term_coeff * xm;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return std::abs(sum) / std::pow(ax, p);
  }
  double poly = 0.0, c = 1.0, xm = 1.0;
  for (int m = 0; m <= k; ++m) {
    if (m > 0) {
      c *= (p - m + 1) / m;
      xm *= x;
    }
    poly += c * xm;
  }
  const double plus = 1.0 + x > 0.0 ? std::pow(1.0 + x, p) : 0.0;
  return std::abs(poly - plus) / std::pow(ax, p);
}

TaylorCheck taylor_remainder_check(long samples, double p, std::uint64_t seed) {
  if (!(p >= 2.0)) throw ConfigError("p must be >= 2");
  if (samples < 1) throw ConfigError("samples must be >= 1");
  std::mt19937_64 rng(seed);
  // Uniform on [0, 1) from the top 53 bits, identical on every platform.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  TaylorCheck out;
  out.p = p;
  out.order = static_cast<int>(std::floor(p));
  out.samples = samples;
  out.seed = seed;
  for (long n = 0; n < samples; ++n) {
    const double a = std::pow(10.0, -3.0 + 6.0 * uniform());
    double b = std::pow(10.0, -3.0 + 6.0 * uniform());
    if (uniform() < 0.5) b = -b;
    const double r = taylor_remainder_ratio(a, b, p);
    if (!std::isfinite(r)) throw NumericalError("non-finite remainder ratio");
    if (r > out.max_ratio) {
      out.max_ratio = r;
      out.argmax_a = a;
      out.argmax_b = b;
    }
  }
  return out;
}

}  // namespace multibump
