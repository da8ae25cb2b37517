#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "multibump/groundstate.hpp"

namespace multibump {

/// Integration region relative to peak i at the origin and peak j at
/// (y0, 0): the cell {x1 < y0/2}, the half cell {0 < x1 < y0/2}, or R^N.
enum class CellKind { Cell, HalfCell, WholeSpace };

/// ∫ f^a(x) g^b(x - (y0, 0)) dx with f, g given as functions of
/// (x1, |x'|); the transverse variable is integrated with the measure of
/// R^{N-1} in polar form.
struct InteractionSpec {
  int dimension = 2;
  std::function<double(double, double)> f;
  std::function<double(double, double)> g;
  double a = 2.0;
  double b = 1.0;
  double y0 = 12.0;
  CellKind cell = CellKind::Cell;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Nested adaptive Gauss-Kronrod quadrature, split at both peaks and the
/// cell boundary. Throws ConfigError unless a > b > 0, y0 > 0 and
/// 1 <= N <= 3, NumericalError when the error estimate exceeds 1% of the
/// value.
QuadratureResult interaction_quadrature(const InteractionSpec& spec);

/// f = U (or |∂U/∂x1| when use_derivative), g = U.
InteractionSpec profile_interaction(const GroundStateProfile& profile, double a, double b, double y0,
                                    CellKind cell = CellKind::Cell, bool use_derivative = false);

/// N = 1, f = g = e^{-|x|}.
InteractionSpec exponential_interaction(double a, double b, double y0,
                                        CellKind cell = CellKind::WholeSpace);

/// Closed form of ∫_R e^{-a|x|} e^{-b|x - y0|} dx for a > b > 0, y0 > 0.
double exponential_interaction_exact(double a, double b, double y0);

struct LimitPoint {
  double y0 = 0.0;
  double value = 0.0;
  double rescaled = 0.0;  // value · e^{b y0} y0^{b(N-1)/2}
};

struct InteractionLimit {
  std::vector<LimitPoint> points;
  /// Two-point extrapolation in 1/y0 from the two largest separations.
  double extrapolated = 0.0;
  double tail_L = 0.0;
  /// ∫ f^a over R^N (over {x1 > 0} for the half cell).
  double C0 = 0.0;
  /// L · C0.
  double stated_limit = 0.0;
  /// L^b ∫ f^a(x) e^{b x1} dx over the same region as C0: the pointwise
  /// limit of the rescaled integrand.
  double pointwise_limit = 0.0;
  /// Rescaled values approach pointwise_limit monotonically along the sweep.
  bool monotone = true;
};

/// Rescaled interaction along a sweep of separations; `tail_L` is the limit
/// of g(x) e^{|x|} |x|^{(N-1)/2}.
InteractionLimit interaction_limit(InteractionSpec spec, const std::vector<double>& separations,
                                   double tail_L);

struct TaylorCheck {
  double p = 0.0;
  int order = 0;  // floor(p)
  long samples = 0;
  std::uint64_t seed = 0;
  double max_ratio = 0.0;
  double argmax_a = 0.0;
  double argmax_b = 0.0;
};

/// |(a+b)₊^p - Σ_{m<=floor p} C(p,m) a^{p-m} b^m| / |b|^p, evaluated stably.
double taylor_remainder_ratio(double a, double b, double p);

/// Max ratio over random a > 0 (log-uniform) and b (signed log-uniform),
/// both in [1e-3, 1e3] in magnitude. Throws ConfigError for p < 2 or
/// samples < 1.
TaylorCheck taylor_remainder_check(long samples, double p, std::uint64_t seed);

}  // namespace multibump
