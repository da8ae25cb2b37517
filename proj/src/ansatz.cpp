#include "multibump/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "multibump/error.hpp"

namespace multibump {

namespace {

double wrap_angle(double a) {
  double w = std::fmod(a + M_PI, 2.0 * M_PI);
  if (w < 0) w += 2.0 * M_PI;
  return w - M_PI;
}

// Images farther than this contribute below 1e-300.
constexpr double kNegligibleRadius = 680.0;

}  // namespace

PeakConfiguration PeakConfiguration::make(double epsilon, std::vector<double> angles) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (angles.empty()) throw ConfigError("at least one peak is required (k >= 1)");
  for (double& a : angles) {
    if (!std::isfinite(a)) throw ConfigError("peak angles must be finite");
    a = wrap_angle(a);
  }
  std::sort(angles.begin(), angles.end());
  PeakConfiguration c;
  c.epsilon = epsilon;
  c.angles = std::move(angles);
  const auto g = c.gaps();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 2.0)) {
      std::ostringstream msg;
      msg << "peaks violate the separation regime: gap " << g[i] << " after peak " << i + 1
          << " must exceed 2";
      throw ConfigError(msg.str());
    }
  }
  const double max_gap = *std::max_element(g.begin(), g.end());
  c.lattice_cutoff = static_cast<int>(std::ceil(epsilon * (30.0 + max_gap) / (2.0 * M_PI))) + 1;
  return c;
}

PeakConfiguration PeakConfiguration::from_positions(double epsilon,
                                                    const std::vector<double>& positions) {
  std::vector<double> angles;
  angles.reserve(positions.size());
  for (double x : positions) angles.push_back(x * epsilon);
  return make(epsilon, std::move(angles));
}

PeakConfiguration PeakConfiguration::uniform(double epsilon, int k, double offset) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<double> angles;
  for (int i = 0; i < k; ++i) angles.push_back(offset + 2.0 * M_PI * i / k);
  return make(epsilon, std::move(angles));
}

std::vector<double> PeakConfiguration::positions() const {
  std::vector<double> out;
  for (int i = 0; i < k(); ++i) out.push_back(position(i));
  return out;
}

std::vector<double> PeakConfiguration::gaps() const {
  const int n = k();
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double next = i + 1 < n ? angles[static_cast<std::size_t>(i + 1)] : angles[0] + 2.0 * M_PI;
    g[static_cast<std::size_t>(i)] = (next - angles[static_cast<std::size_t>(i)]) / epsilon;
  }
  return g;
}

std::vector<double> PeakConfiguration::half_gaps() const {
  const auto g = gaps();
  const int n = k();
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double before = g[static_cast<std::size_t>((i + n - 1) % n)];
    const double after = g[static_cast<std::size_t>(i)];
    s[static_cast<std::size_t>(i)] = 0.5 * std::min(before, after);
  }
  return s;
}

double PeakConfiguration::sigma_min() const {
  const auto s = half_gaps();
  return *std::min_element(s.begin(), s.end());
}

double superlinear_remainder(double a, double b, double p) {
  if (a <= 0.0) return b > 0.0 ? std::pow(b, p) : 0.0;
  const double ap = std::pow(a, p);
  if (a + b <= 0.0) return -ap - p * std::pow(a, p - 1) * b;
  const double x = b / a;
  if (std::abs(x) < 1e-3) {
    // Σ_{m>=2} C(p, m) x^m
    double term = p * x;
    double sum = 0.0;
    for (int m = 2; m <= 8; ++m) {
      term *= (p - m + 1) * x / m;
      sum += term;
    }
    return ap * sum;
  }
  return ap * (std::expm1(p * std::log1p(x)) - p * x);
}

double power_of_sum_defect(std::span<const double> terms, double p) {
  double top = 0.0;
  std::size_t top_index = 0;
  for (std::size_t n = 0; n < terms.size(); ++n) {
    if (terms[n] > top) {
      top = terms[n];
      top_index = n;
    }
  }
  if (top <= 0.0) return 0.0;
  double rest = 0.0;
  double rest_p = 0.0;
  for (std::size_t n = 0; n < terms.size(); ++n) {
    if (n == top_index || terms[n] <= 0.0) continue;
    rest += terms[n];
    rest_p += std::pow(terms[n], p);
  }
  return std::pow(top, p) * std::expm1(p * std::log1p(rest / top)) - rest_p;
}

AnsatzBundle build_ansatz(const PeakConfiguration& config,
                          std::shared_ptr<const GroundStateProfile> profile, const StripGrid& grid) {
  if (!profile) throw ConfigError("ground-state profile is required");
  if (profile->dimension != 2)
    throw ConfigError("the strip discretization is two-dimensional: profile must have N = 2");
  if (std::abs(grid.period() - config.period()) > 1e-12 * config.period())
    throw ConfigError("grid period must equal 2π/ε of the peak configuration");

  AnsatzBundle b;
  b.config = config;
  b.profile = profile;
  b.grid = grid;
  const int k = config.k();
  const int L = config.lattice_cutoff;
  const double T = config.period();
  const double p = profile->exponent;
  b.ubar = GridField(grid);
  b.interaction_residual = GridField(grid);
  b.peak_fields.assign(static_cast<std::size_t>(k), GridField(grid));
  b.translation_modes.assign(static_cast<std::size_t>(k), GridField(grid));
  b.cell_labels.assign(static_cast<std::size_t>(grid.size()), 0);

  const auto positions = config.positions();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(k * (2 * L + 1)));
  for (int i = 0; i < grid.nodes_x1; ++i) {
    const double x1 = grid.x1(i);
    // Nearest image distance along x1 per peak; ties go to the lower index.
    int label = 0;
    double best = INFINITY;
    for (int q = 0; q < k; ++q) {
      const double d = std::remainder(x1 - positions[static_cast<std::size_t>(q)], T);
      const double ad = std::abs(d);
      if (ad < best - 1e-12 * T) {
        best = ad;
        label = q;
      }
    }
    for (int j = 0; j < grid.nodes_xp; ++j) {
      const double x2 = grid.x2(j);
      const int node = grid.index(i, j);
      terms.clear();
      double total = 0.0;
      for (int q = 0; q < k; ++q) {
        double v = 0.0;
        double t = 0.0;
        for (int l = -L; l <= L; ++l) {
          const double dx = x1 - positions[static_cast<std::size_t>(q)] - l * T;
          const double r = std::hypot(dx, x2);
          if (r > kNegligibleRadius) continue;
          const double u = profile->value(r);
          v += u;
          if (r > 0.0) t += profile->derivative(r) * dx / r;
          terms.push_back(u);
        }
        b.peak_fields[static_cast<std::size_t>(q)].data[node] = v;
        b.translation_modes[static_cast<std::size_t>(q)].data[node] = t;
        total += v;
      }
      b.ubar.data[node] = total;
      b.interaction_residual.data[node] = -power_of_sum_defect(terms, p);
      b.cell_labels[static_cast<std::size_t>(node)] = label;
    }
  }
  return b;
}

GridField residual(const AnsatzBundle& bundle) { return bundle.interaction_residual; }

GridField residual_via_operator(const AnsatzBundle& bundle) {
  const double p = bundle.exponent();
  Vector out = Helmholtz(bundle.grid).apply(bundle.ubar.data);
  for (Eigen::Index n = 0; n < out.size(); ++n)
    out[n] -= std::pow(std::max(bundle.ubar.data[n], 0.0), p);
  return GridField(bundle.grid, std::move(out));
}

ResidualNorms residual_l2(const AnsatzBundle& bundle, double eta_for_p2) {
  ResidualNorms r;
  const GridField& m = bundle.interaction_residual;
  r.l2 = l2_norm(m);
  r.sup = m.sup_norm();
  r.sigma_min = bundle.config.sigma_min();
  const double s = r.sigma_min;
  const double decay = bundle.exponent() > 2.0 ? 2.0 : 2.0 * eta_for_p2;
  r.predicted_rate = std::exp(-decay * s) * std::pow(s, -0.5);
  r.l2_ratio = r.l2 / r.predicted_rate;
  r.sup_ratio = r.sup / r.predicted_rate;
  return r;
}

}  // namespace multibump
