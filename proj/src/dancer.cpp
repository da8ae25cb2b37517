#include "multibump/dancer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/SparseLU>
#include <fftw3.h>

#include "multibump/error.hpp"
#include "multibump/weighted.hpp"

namespace multibump {

namespace {

// (b + w)₊^p - b₊^p
double power_increment(double b, double w, double p) {
  if (b > 0.0) return p * std::pow(b, p - 1.0) * w + superlinear_remainder(b, w, p);
  return b + w > 0.0 ? std::pow(b + w, p) : 0.0;
}

double quad_norm(const Vector& f, const Vector& weights) {
  return std::sqrt(f.cwiseAbs2().dot(weights));
}

}  // namespace

DancerSolution newton_core(const NewtonProblem& problem, const NewtonOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("tol must be > 0");
  const StripGrid& grid = problem.grid;
  const int n = grid.size();
  const int np = static_cast<int>(problem.pin_modes.size());
  const double p = problem.exponent;
  if (problem.base.size() != n || problem.base_residual.size() != n ||
      problem.initial_correction.size() != n)
    throw ConfigError("Newton problem fields do not match the grid");
  if (np < 1) throw ConfigError("at least one pinning mode is required");
  const Helmholtz helm(grid);
  const SparseMatrix& K = helm.stiffness();
  const Vector& W = helm.weights();
  Eigen::MatrixXd c(n, np);
  Eigen::MatrixXd a_pin(n, np);
  Vector target(np);
  for (int q = 0; q < np; ++q) {
    const Vector& t = problem.pin_modes[static_cast<std::size_t>(q)];
    if (t.size() != n) throw ConfigError("Newton problem fields do not match the grid");
    c.col(q) = K * t;
    if (!(c.col(q).norm() > 0.0)) throw ConfigError("pinning mode must be nonzero");
    a_pin.col(q) = helm.apply(t);
    target[q] = c.col(q).dot(problem.initial_correction);
  }

  auto residual = [&](const Vector& w) {
    Vector f = problem.base_residual + helm.apply(w);
    for (int r = 0; r < n; ++r) f[r] -= power_increment(problem.base[r], w[r], p);
    return f;
  };

  // Bordered Jacobian: K - W diag(p u₊^{p-1}) with dense pinning rows/columns.
  std::vector<Eigen::Triplet<double>> pattern;
  pattern.reserve(static_cast<std::size_t>(K.nonZeros() + 2 * n * np));
  for (int col = 0; col < K.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(K, col); it; ++it)
      pattern.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int q = 0; q < np; ++q) {
    for (int r = 0; r < n; ++r) {
      if (c(r, q) == 0.0) continue;
      pattern.emplace_back(r, n + q, c(r, q));
      pattern.emplace_back(n + q, r, c(r, q));
    }
  }
  SparseMatrix jac(n + np, n + np);
  jac.setFromTriplets(pattern.begin(), pattern.end());
  jac.makeCompressed();
  std::vector<int> diag_slot(static_cast<std::size_t>(n));
  Vector k_diag(n);
  for (int r = 0; r < n; ++r) {
    k_diag[r] = K.coeff(r, r);
    diag_slot[static_cast<std::size_t>(r)] = static_cast<int>(&jac.coeffRef(r, r) - jac.valuePtr());
  }
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(jac);

  DancerSolution sol;
  sol.epsilon = grid.epsilon;
  Vector w = problem.initial_correction;
  Vector mu = Vector::Zero(np);
  Vector f = residual(w);
  double res = quad_norm(f, W);
  double merit = res;
  sol.newton_history.push_back(res);

  for (int it = 0; it < options.max_iterations && merit > options.tol; ++it) {
    for (int r = 0; r < n; ++r) {
      const double u = problem.base[r] + w[r];
      const double dp = u > 0.0 ? p * std::pow(u, p - 1.0) : 0.0;
      jac.valuePtr()[diag_slot[static_cast<std::size_t>(r)]] = k_diag[r] - W[r] * dp;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) throw NumericalError("Newton Jacobian solve failed");
    Vector rhs(n + np);
    rhs.head(n) = -W.cwiseProduct(f + a_pin * mu);
    rhs.tail(np) = -(c.transpose() * w - target);
    const Vector step = lu.solve(rhs);
    if (!step.allFinite()) throw NumericalError("Newton Jacobian solve failed");
    const Vector dw = step.head(n);
    const Vector dmu = step.tail(np);

    bool accepted = false;
    double s = 1.0;
    for (int h = 0; h <= options.max_halvings; ++h, s *= 0.5) {
      const Vector wt = w + s * dw;
      const Vector ft = residual(wt);
      const Vector mt_vec = mu + s * dmu;
      const double mt = quad_norm(ft + a_pin * mt_vec, W);
      if (mt < merit) {
        w = wt;
        mu = mt_vec;
        f = ft;
        merit = mt;
        res = quad_norm(f, W);
        accepted = true;
        break;
      }
    }
    sol.iterations = it + 1;
    if (!accepted) {
      const double scale = std::max((problem.base + w).cwiseAbs().maxCoeff(), 1e-300);
      if (dw.cwiseAbs().maxCoeff() <= 1e-12 * scale) break;  // stagnated at roundoff
      std::ostringstream msg;
      msg << "Newton left its basin: damping could not reduce the residual " << merit;
      throw NumericalError(msg.str());
    }
    sol.newton_history.push_back(res);
  }
  // With several pins the augmented residual is what Newton drives to zero;
  // the multipliers then measure the force on each pinned peak.
  const double achieved = np == 1 ? res : merit;
  sol.converged = achieved <= options.tol;
  if (!sol.converged) {
    std::ostringstream msg;
    msg << "Newton did not reach tol " << options.tol << " (residual " << achieved << " after "
        << sol.iterations << " iterations)";
    throw NumericalError(msg.str());
  }
  sol.multipliers.assign(mu.data(), mu.data() + np);
  sol.field = GridField(grid, problem.base + w);
  sol.correction = GridField(grid, std::move(w));
  sol.min_value = sol.field.data.minCoeff();
  return sol;
}

DancerSolution newton_solve(const GridField& initial, const GridField& pin_mode, double exponent,
                            const NewtonOptions& options) {
  if (!(initial.grid == pin_mode.grid)) throw ConfigError("fields live on different grids");
  NewtonProblem prob;
  prob.grid = initial.grid;
  prob.exponent = exponent;
  prob.base = initial.data;
  prob.base_residual = Helmholtz(initial.grid).apply(initial.data);
  for (Eigen::Index r = 0; r < prob.base.size(); ++r)
    prob.base_residual[r] -= std::pow(std::max(prob.base[r], 0.0), exponent);
  prob.initial_correction = Vector::Zero(initial.grid.size());
  prob.pin_modes = {pin_mode.data};
  return newton_core(prob, options);
}

DancerSolution newton_solve(const AnsatzBundle& bundle, int pin, const NewtonOptions& options) {
  if (pin < 0 || pin >= bundle.config.k()) throw ConfigError("pin peak index out of range");
  DancerSolution sol = newton_solve(bundle.ubar, bundle.translation_modes[static_cast<std::size_t>(pin)],
                                    bundle.exponent(), options);
  sol.k = bundle.config.k();
  sol.pin = pin;
  sol.pin_location = bundle.config.position(pin);
  sol.positions = bundle.config.positions();
  return sol;
}

namespace {

DancerSolution pinned_at(const PeakConfiguration& config,
                         const std::shared_ptr<const GroundStateProfile>& profile,
                         const StripGrid& grid, const NewtonOptions& options) {
  const AnsatzBundle bundle = build_ansatz(config, profile, grid);
  NewtonProblem prob;
  prob.grid = grid;
  prob.exponent = bundle.exponent();
  prob.base = bundle.ubar.data;
  prob.base_residual = residual_via_operator(bundle).data;
  prob.initial_correction = Vector::Zero(grid.size());
  for (const GridField& t : bundle.translation_modes) prob.pin_modes.push_back(t.data);
  return newton_core(prob, options);
}

double vector_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

DancerSolution relax_and_solve(const PeakConfiguration& config,
                               std::shared_ptr<const GroundStateProfile> profile,
                               const StripGrid& grid, int pin, const NewtonOptions& options,
                               const RelaxOptions& relax) {
  const int k = config.k();
  if (pin < 0 || pin >= k) throw ConfigError("pin peak index out of range");
  if (!(relax.tol > 0.0) || !(relax.fd_step > 0.0)) throw ConfigError("relaxation tolerances must be > 0");
  PeakConfiguration cfg = config;
  int steps = 0;
  if (k >= 2) {
    DancerSolution current = pinned_at(cfg, profile, grid, options);
    for (;; ++steps) {
      const double target = relax.tol * std::exp(-2.0 * cfg.sigma_min()) / std::sqrt(cfg.sigma_min());
      double worst = 0.0;
      for (double m : current.multipliers) worst = std::max(worst, std::abs(m));
      if (worst <= target) break;
      if (steps >= relax.max_steps) {
        std::ostringstream msg;
        msg << "position relaxation did not converge in " << relax.max_steps
            << " steps (max multiplier " << worst << ")";
        throw NumericalError(msg.str());
      }
      const std::vector<double> x0 = cfg.positions();
      std::vector<int> free;
      for (int q = 0; q < k; ++q)
        if (q != pin) free.push_back(q);
      Eigen::MatrixXd jac(k, k - 1);
      for (std::size_t c = 0; c < free.size(); ++c) {
        std::vector<double> x = x0;
        x[static_cast<std::size_t>(free[c])] += relax.fd_step;
        const DancerSolution moved =
            pinned_at(PeakConfiguration::from_positions(cfg.epsilon, x), profile, grid, options);
        for (int r = 0; r < k; ++r)
          jac(r, static_cast<Eigen::Index>(c)) =
              (moved.multipliers[static_cast<std::size_t>(r)] -
               current.multipliers[static_cast<std::size_t>(r)]) / relax.fd_step;
      }
      const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(current.multipliers.data(), k);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (!(svd.singularValues().minCoeff() > 1e-12 * svd.singularValues().maxCoeff()))
        throw NumericalError("position relaxation Jacobian is singular");
      const Eigen::VectorXd step = -svd.solve(rhs);
      const double base = vector_norm(current.multipliers);
      bool accepted = false;
      double s = 1.0;
      for (int h = 0; h < 30 && !accepted; ++h, s *= 0.5) {
        std::vector<double> x = x0;
        for (std::size_t c = 0; c < free.size(); ++c)
          x[static_cast<std::size_t>(free[c])] += s * step[static_cast<Eigen::Index>(c)];
        PeakConfiguration trial;
        try {
          trial = PeakConfiguration::from_positions(cfg.epsilon, x);
        } catch (const ConfigError&) {
          continue;
        }
        if (std::abs(std::remainder(trial.position(pin) - x0[static_cast<std::size_t>(pin)],
                                    trial.period())) > 1e-9 * trial.period())
          continue;
        DancerSolution moved = pinned_at(trial, profile, grid, options);
        if (vector_norm(moved.multipliers) < base) {
          cfg = trial;
          current = std::move(moved);
          accepted = true;
        }
      }
      if (!accepted) throw NumericalError("position relaxation line search failed");
    }
    NewtonOptions final_options = options;
    DancerSolution sol = newton_solve(current.field,
                                      build_ansatz(cfg, profile, grid).translation_modes[static_cast<std::size_t>(pin)],
                                      profile->exponent, final_options);
    sol.newton_history.insert(sol.newton_history.begin(), current.newton_history.begin(),
                              current.newton_history.end());
    sol.iterations += current.iterations;
    sol.k = k;
    sol.pin = pin;
    sol.pin_location = cfg.position(pin);
    sol.positions = cfg.positions();
    sol.relaxation_steps = steps;
    return sol;
  }
  const AnsatzBundle bundle = build_ansatz(cfg, profile, grid);
  DancerSolution sol = newton_solve(bundle, pin, options);
  sol.positions = cfg.positions();
  return sol;
}

DiscreteGroundState discrete_ground_state(const GroundStateProfile& profile, const StripGrid& grid,
                                          double min_length, const NewtonOptions& options) {
  if (profile.dimension != 2) throw ConfigError("profile must have N = 2");
  DiscreteGroundState gs;
  gs.exponent = profile.exponent;
  gs.multiple = std::max(1, static_cast<int>(std::ceil(min_length / grid.period() - 1e-12)));
  gs.box = grid;
  gs.box.epsilon = grid.epsilon / gs.multiple;
  gs.box.nodes_x1 = grid.nodes_x1 * gs.multiple;
  const StripGrid& box = gs.box;
  const double L = box.period();
  NewtonProblem prob;
  prob.grid = box;
  prob.exponent = profile.exponent;
  prob.base.resize(box.size());
  Vector pin(box.size());
  for (int i = 0; i < box.nodes_x1; ++i) {
    const double dx = std::remainder(box.x1(i) - box.x1(0), L);
    for (int j = 0; j < box.nodes_xp; ++j) {
      const double r = std::hypot(dx, box.x2(j));
      prob.base[box.index(i, j)] = profile.value(r);
      pin[box.index(i, j)] = r > 0.0 ? profile.derivative(r) * dx / r : 0.0;
    }
  }
  prob.pin_modes = {pin};
  prob.base_residual = Helmholtz(box).apply(prob.base);
  for (Eigen::Index r = 0; r < prob.base.size(); ++r)
    prob.base_residual[r] -= std::pow(prob.base[r], profile.exponent);
  prob.initial_correction = Vector::Zero(box.size());
  NewtonOptions o = options;
  o.tol = std::min(options.tol, 1e-12);
  const DancerSolution sol = newton_core(prob, o);
  gs.values = sol.field.data;
  gs.residual = sol.newton_history.back();
  gs.iterations = sol.iterations;
  return gs;
}

PeriodizedBase periodize(const DiscreteGroundState& gs, const StripGrid& grid, int k) {
  if (k < 1 || grid.nodes_x1 % k != 0)
    throw ConfigError("node count along x1 must be a multiple of k");
  if (gs.box.nodes_x1 != grid.nodes_x1 * gs.multiple || gs.box.nodes_xp != grid.nodes_xp)
    throw ConfigError("discrete ground state was computed on a different grid");
  const int n1 = grid.nodes_x1;
  const int n2 = grid.nodes_xp;
  const int m = gs.multiple;
  PeriodizedBase out;
  out.base = GridField(grid);
  out.residual = GridField(grid);
  for (int q = 0; q < k; ++q) out.peak_nodes.push_back(q * (n1 / k));
  std::vector<double> terms(static_cast<std::size_t>(k * m));
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      double total = 0.0;
      std::size_t t = 0;
      for (int q = 0; q < k; ++q) {
        const int offset = ((i - out.peak_nodes[static_cast<std::size_t>(q)]) % n1 + n1) % n1;
        for (int l = 0; l < m; ++l) {
          const double u = gs.values[gs.box.index(offset + l * n1, j)];
          terms[t++] = u;
          total += u;
        }
      }
      out.base(i, j) = total;
      out.residual(i, j) = -power_of_sum_defect(terms, gs.exponent);
    }
  }
  return out;
}

namespace {

struct LineSpectrum {
  int n1 = 0;
  int n2 = 0;
  int modes = 0;
  std::vector<std::complex<double>> data;  // [m * n2 + j]
};

LineSpectrum forward(const GridField& field) {
  LineSpectrum s;
  s.n1 = field.grid.nodes_x1;
  s.n2 = field.grid.nodes_xp;
  s.modes = s.n1 / 2 + 1;
  s.data.resize(static_cast<std::size_t>(s.modes) * static_cast<std::size_t>(s.n2));
  Vector in = field.data;
  int n[1] = {s.n1};
  fftw_plan plan = fftw_plan_many_dft_r2c(1, n, s.n2, in.data(), nullptr, s.n2, 1,
                                          reinterpret_cast<fftw_complex*>(s.data.data()), nullptr,
                                          s.n2, 1, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return s;
}

GridField backward(LineSpectrum s, const StripGrid& grid) {
  GridField out(grid);
  int n[1] = {s.n1};
  fftw_plan plan = fftw_plan_many_dft_c2r(1, n, s.n2, reinterpret_cast<fftw_complex*>(s.data.data()),
                                          nullptr, s.n2, 1, out.data.data(), nullptr, s.n2, 1,
                                          FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  out.data /= static_cast<double>(s.n1);
  return out;
}

double wavenumber(const StripGrid& g, int m) { return 2.0 * M_PI * m / g.period(); }

bool is_nyquist(const LineSpectrum& s, int m) { return s.n1 % 2 == 0 && m == s.n1 / 2; }

// Trigonometric interpolant of a real line and its first two derivatives.
struct TrigLine {
  std::vector<std::complex<double>> coef;  // r2c coefficients
  int n = 0;
  double x0 = 0.0;
  double period = 1.0;

  std::array<double, 3> eval(double x) const {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    const double s = x - x0;
    for (std::size_t m = 0; m < coef.size(); ++m) {
      const double k = 2.0 * M_PI * static_cast<double>(m) / period;
      double mult = (m == 0 || (n % 2 == 0 && static_cast<int>(m) == n / 2)) ? 1.0 : 2.0;
      std::complex<double> e(std::cos(k * s), std::sin(k * s));
      std::complex<double> t = coef[m] * e;
      if (n % 2 == 0 && static_cast<int>(m) == n / 2) t = coef[m].real() * std::cos(k * s);
      out[0] += mult * t.real();
      const std::complex<double> d1 = std::complex<double>(0.0, k) * t;
      out[1] += mult * d1.real();
      out[2] += mult * (-k * k * t).real();
    }
    for (double& v : out) v /= n;
    return out;
  }
};

TrigLine line_at_axis(const GridField& field) {
  const LineSpectrum s = forward(field);
  TrigLine line;
  line.n = s.n1;
  line.x0 = field.grid.x1(0);
  line.period = field.grid.period();
  for (int m = 0; m < s.modes; ++m)
    line.coef.push_back(s.data[static_cast<std::size_t>(m) * static_cast<std::size_t>(s.n2)]);
  return line;
}

}  // namespace

GridField shift_x1(const GridField& field, double tau) {
  LineSpectrum s = forward(field);
  for (int m = 0; m < s.modes; ++m) {
    const double phase = -wavenumber(field.grid, m) * tau;
    const std::complex<double> e(std::cos(phase), std::sin(phase));
    for (int j = 0; j < s.n2; ++j) {
      auto& c = s.data[static_cast<std::size_t>(m) * static_cast<std::size_t>(s.n2) + static_cast<std::size_t>(j)];
      c = is_nyquist(s, m) ? std::complex<double>(c.real() * std::cos(phase), 0.0) : c * e;
    }
  }
  return backward(std::move(s), field.grid);
}

GridField reflect_x1(const GridField& field, double center) {
  const StripGrid& g = field.grid;
  GridField mirrored(g);
  for (int i = 0; i < g.nodes_x1; ++i)
    for (int j = 0; j < g.nodes_xp; ++j) mirrored(i, j) = field(g.wrap(g.nodes_x1 - i), j);
  return shift_x1(mirrored, 2.0 * center);
}

double peak_location(const GridField& field, double guess) {
  const StripGrid& g = field.grid;
  const double h = g.h1();
  int i = g.wrap(static_cast<int>(std::lround((guess - g.x1(0)) / h)));
  for (int guard = 0; guard < g.nodes_x1; ++guard) {
    const int left = g.wrap(i - 1);
    const int right = g.wrap(i + 1);
    if (field(right, 0) > field(i, 0) && field(right, 0) >= field(left, 0)) {
      i = right;
    } else if (field(left, 0) > field(i, 0)) {
      i = left;
    } else {
      break;
    }
  }
  const TrigLine line = line_at_axis(field);
  double x = g.x1(i);
  for (int it = 0; it < 60; ++it) {
    const auto v = line.eval(x);
    if (!(v[2] < 0.0)) break;
    double dx = -v[1] / v[2];
    dx = std::clamp(dx, -h, h);
    x += dx;
    if (std::abs(dx) < 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  // Report the location closest to the guess modulo the period.
  return guess + std::remainder(x - guess, g.period());
}

AlignmentReport align_x1(const GridField& a, const GridField& b) {
  if (!(a.grid == b.grid)) throw ConfigError("fields live on different grids");
  const StripGrid& g = a.grid;
  const LineSpectrum sa = forward(a);
  const LineSpectrum sb = forward(b);
  // Cross spectrum summed over x2 with quadrature weights.
  std::vector<std::complex<double>> cross(static_cast<std::size_t>(sa.modes));
  for (int m = 0; m < sa.modes; ++m) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < sa.n2; ++j) {
      const std::size_t at = static_cast<std::size_t>(m) * static_cast<std::size_t>(sa.n2) + static_cast<std::size_t>(j);
      acc += g.weight(j) * sa.data[at] * std::conj(sb.data[at]);
    }
    cross[static_cast<std::size_t>(m)] = acc;
  }
  // C(tau) = Σ_m mult Re(X_m e^{-i k tau}) with derivatives.
  auto corr = [&](double tau) {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int m = 0; m < sa.modes; ++m) {
      const double k = wavenumber(g, m);
      const double mult = (m == 0 || is_nyquist(sa, m)) ? 1.0 : 2.0;
      const std::complex<double> e(std::cos(-k * tau), std::sin(-k * tau));
      const std::complex<double> t = cross[static_cast<std::size_t>(m)] * e;
      out[0] += mult * t.real();
      out[1] += mult * (std::complex<double>(0.0, -k) * t).real();
      out[2] += mult * (-k * k * t).real();
    }
    return out;
  };
  int best = 0;
  double best_value = -INFINITY;
  for (int i = 0; i < g.nodes_x1; ++i) {
    const double v = corr(i * g.h1())[0];
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double tau = best * g.h1();
  for (int it = 0; it < 60; ++it) {
    const auto v = corr(tau);
    if (!(v[2] < 0.0)) break;
    const double d = std::clamp(-v[1] / v[2], -g.h1(), g.h1());
    tau += d;
    if (std::abs(d) < 1e-15 * std::max(1.0, std::abs(tau))) break;
  }
  tau = std::remainder(tau, g.period());
  AlignmentReport r;
  r.shift = tau;
  r.sup_difference = (shift_x1(a, tau).data - b.data).cwiseAbs().maxCoeff();
  return r;
}

EvennessReport verify_evenness(const DancerSolution& sol, double tol, double offset) {
  EvennessReport r;
  r.center = peak_location(sol.field, sol.pin_location) + offset;
  r.sup_difference = (reflect_x1(sol.field, r.center).data - sol.field.data).cwiseAbs().maxCoeff();
  r.threshold = 10.0 * tol;
  r.passed = r.sup_difference < r.threshold;
  return r;
}

PeriodReport verify_minimal_period(const DancerSolution& sol, double tol) {
  const double T = sol.field.grid.period();
  PeriodReport r;
  r.amplitude = sol.field.sup_norm();
  r.period_difference =
      (shift_x1(sol.field, T / sol.k).data - sol.field.data).cwiseAbs().maxCoeff();
  r.half_period_difference =
      (shift_x1(sol.field, T / (2.0 * sol.k)).data - sol.field.data).cwiseAbs().maxCoeff();
  r.passed = r.period_difference < 10.0 * tol && r.half_period_difference >= 0.5 * r.amplitude;
  return r;
}

PsiFit psi_decay_fit(const std::vector<DancerSolution>& solutions, double eta, double eta_prime,
                     double exponent) {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  if (!(eta_prime > 0.0 && eta_prime < 1.0)) throw ConfigError("eta_prime must lie in (0, 1)");
  if (!(eta_prime < exponent - 1.0 - eta)) throw ConfigError("eta_prime must be < p - 1 - eta");
  if (solutions.size() < 2) throw ConfigError("psi fit needs at least two solutions");
  PsiFit fit;
  fit.eta = eta;
  fit.eta_prime = eta_prime;
  fit.predicted_slope = -2.0 * eta_prime;
  for (const DancerSolution& s : solutions) {
    if (!s.psi) throw ConfigError("solution carries no psi field");
    const GridField& psi = *s.psi;
    std::vector<double> angles;
    for (int q = 0; q < s.k; ++q)
      angles.push_back(s.epsilon * s.pin_location + 2.0 * M_PI * q / s.k);
    const PeakConfiguration cfg = PeakConfiguration::make(s.epsilon, angles);
    const GridField d = distance_to_peaks(psi.grid, cfg);
    PsiFitPoint pt;
    pt.epsilon = s.epsilon;
    pt.abscissa = M_PI / (s.k * s.epsilon);
    for (Eigen::Index n = 0; n < psi.data.size(); ++n)
      pt.weighted_sup = std::max(pt.weighted_sup, std::abs(psi.data[n]) * std::exp(eta * d.data[n]));
    pt.psi_sup = psi.sup_norm();
    const StripGrid& g = psi.grid;
    const int i = g.wrap(static_cast<int>(std::lround((s.pin_location - g.x1(0)) / g.h1())));
    pt.psi_at_peak = psi(i, 0);
    fit.points.push_back(pt);
  }
  std::sort(fit.points.begin(), fit.points.end(),
            [](const PsiFitPoint& a, const PsiFitPoint& b) { return a.abscissa < b.abscissa; });
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(fit.points.size());
  for (std::size_t n = 0; n < fit.points.size(); ++n) {
    const double x = fit.points[n].abscissa;
    const double y = std::log(fit.points[n].weighted_sup);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    if (n > 0 && !(fit.points[n].weighted_sup < fit.points[n - 1].weighted_sup)) fit.monotone = false;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

DancerSolution dancer_with_psi(std::shared_ptr<const GroundStateProfile> profile, double epsilon,
                               int k, double transverse_extent, double spacing,
                               const NewtonOptions& options) {
  if (!profile) throw ConfigError("ground-state profile is required");
  const StripGrid grid = StripGrid::make(epsilon, transverse_extent, spacing, k);
  const DiscreteGroundState gs = discrete_ground_state(*profile, grid, 80.0, options);
  const PeriodizedBase pb = periodize(gs, grid, k);
  const PeakConfiguration cfg = PeakConfiguration::uniform(epsilon, k);
  const AnsatzBundle bundle = build_ansatz(cfg, profile, grid);

  NewtonProblem prob;
  prob.grid = grid;
  prob.exponent = profile->exponent;
  prob.base = pb.base.data;
  prob.base_residual = pb.residual.data;
  prob.initial_correction = Vector::Zero(grid.size());
  prob.pin_modes = {bundle.translation_modes[0].data};
  NewtonOptions o = options;
  const double r0 = std::sqrt(pb.residual.data.cwiseAbs2().dot(Helmholtz(grid).weights()));
  o.tol = std::min(options.tol, std::max(1e-8 * r0, 1e-300));
  DancerSolution sol = newton_core(prob, o);
  sol.k = k;
  sol.pin = 0;
  sol.pin_location = cfg.position(0);
  sol.psi = sol.correction;
  return sol;
}

}  // namespace multibump
