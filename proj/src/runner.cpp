#include "multibump/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "multibump/acceptance.hpp"
#include "multibump/asymptotics.hpp"
#include "multibump/dancer.hpp"
#include "multibump/error.hpp"
#include "multibump/reduction.hpp"
#include "multibump/spectrum.hpp"
#include "multibump/weighted.hpp"

namespace multibump {

namespace {

using Json = nlohmann::json;

const std::vector<std::string> kCommands{"groundstate", "ansatz",  "spectrum", "reduce",
                                         "equilibrate", "dancer", "oracle",   "check"};

// Profiles for every grid-based command are solved to this ODE residual.
constexpr double kProfileTol = 1e-9;

std::string csv_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::vector<double> parse_sweep(const std::string& text) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("eps_sweep: expected start:stop:count, got '" + text + "'");
    }
  }
  if (parts.size() != 3 || parts[2] < 1 || parts[2] != std::floor(parts[2]))
    throw ConfigError("eps_sweep: expected start:stop:count with integer count >= 1");
  const int n = static_cast<int>(parts[2]);
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(n == 1 ? parts[0] : parts[0] + (parts[1] - parts[0]) * i / (n - 1));
  return out;
}

std::vector<double> epsilons(const RunConfig& c) {
  return c.eps_sweep.empty() ? std::vector<double>{c.epsilon} : parse_sweep(c.eps_sweep);
}

int peak_count(const RunConfig& c) { return c.peaks.empty() ? c.k : static_cast<int>(c.peaks.size()); }

// Uniform peaks, each non-pinned one displaced by perturbation · T/k · r,
// r uniform in [-1, 1] from the seed.
PeakConfiguration make_config(const RunConfig& c, double eps) {
  if (!c.peaks.empty()) return PeakConfiguration::make(eps, c.peaks);
  if (c.perturbation == 0.0) return PeakConfiguration::uniform(eps, c.k);
  std::mt19937_64 rng(c.seed);
  const double T = 2.0 * M_PI / eps;
  std::vector<double> x;
  for (int q = 0; q < c.k; ++q) {
    const double r = q == 0 ? 0.0 : 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    x.push_back(-M_PI / eps + (q + c.perturbation * r) * T / c.k);
  }
  return PeakConfiguration::from_positions(eps, x);
}

StripGrid make_grid(const RunConfig& c, double eps) {
  return StripGrid::make(eps, c.transverse_extent, c.spacing, peak_count(c));
}

std::shared_ptr<const GroundStateProfile> desk_profile(const RunConfig& c) {
  return std::make_shared<const GroundStateProfile>(solve_ground_state(2, c.exponent, kProfileTol));
}

Json residual_json(const ResidualNorms& n) {
  return {{"l2", n.l2},
          {"sup", n.sup},
          {"sigma_min", n.sigma_min},
          {"predicted_rate", n.predicted_rate},
          {"l2_ratio", n.l2_ratio},
          {"sup_ratio", n.sup_ratio}};
}

Json weighted_json(const WeightedNorms& w) {
  return {{"eta", w.eta}, {"value", w.value}, {"gradient", w.gradient}, {"total", w.total}};
}

Json run_groundstate(const RunConfig& c, RunOutput& out) {
  const GroundStateProfile g = solve_ground_state(c.dimension, c.exponent, resolved_tol(c));
  std::ostringstream csv;
  csv << "r,U,dU\n";
  for (std::size_t j = 0; j < g.radius.size(); ++j)
    csv << csv_double(g.radius[j]) << ',' << csv_double(g.values[j]) << ','
        << csv_double(g.derivatives[j]) << '\n';
  out.tables.emplace_back("groundstate_profile.csv", csv.str());
  return {{"dimension", g.dimension},
          {"exponent", g.exponent},
          {"center_value", g.center_value},
          {"tail_L0", g.tail_L0},
          {"tail_L1", g.tail_L1},
          {"tail_match_radius", g.tail_match_radius},
          {"tail_amplitude", g.tail_amplitude},
          {"ode_residual", g.ode_residual},
          {"bracket", {g.bracket_low, g.bracket_high}},
          {"radius", g.radius},
          {"values", g.values},
          {"derivatives", g.derivatives}};
}

Json run_ansatz(const RunConfig& c, RunOutput& out) {
  const auto profile = desk_profile(c);
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "sigma_min,epsilon,l2,sup,predicted_rate,l2_ratio,sup_ratio\n";
  auto add = [&](const PeakConfiguration& cfg) {
    const StripGrid grid = StripGrid::make(cfg.epsilon, c.transverse_extent, c.spacing, cfg.k());
    const ResidualNorms n = residual_l2(build_ansatz(cfg, profile, grid));
    Json row = residual_json(n);
    row["epsilon"] = cfg.epsilon;
    row["angles"] = cfg.angles;
    rows.push_back(row);
    csv << csv_double(n.sigma_min) << ',' << csv_double(cfg.epsilon) << ',' << csv_double(n.l2) << ','
        << csv_double(n.sup) << ',' << csv_double(n.predicted_rate) << ',' << csv_double(n.l2_ratio)
        << ',' << csv_double(n.sup_ratio) << '\n';
  };
  if (!c.sigma_sweep.empty()) {
    for (double s : c.sigma_sweep) add(PeakConfiguration::uniform(M_PI / (c.k * s), c.k));
  } else {
    for (double eps : epsilons(c)) add(make_config(c, eps));
  }
  out.tables.emplace_back("ansatz_residuals.csv", csv.str());
  return {{"rows", rows}};
}

Json run_spectrum(const RunConfig& c, RunOutput&) {
  const auto profile = desk_profile(c);
  const PeakConfiguration cfg = make_config(c, c.epsilon);
  const AnsatzBundle b = build_ansatz(cfg, profile, make_grid(c, c.epsilon));
  const int count = c.count > 0 ? c.count : 2 * cfg.k() + 2;
  EigenOptions opts;
  opts.seed = c.seed;
  const NearKernelRun run = compute_near_kernel(b, count, resolved_tol(c), opts);
  const SpectralResult& s = run.spectrum;
  Json overlaps = Json::array();
  for (Eigen::Index a = 0; a < s.overlap_matrix.rows(); ++a) {
    std::vector<double> row(static_cast<std::size_t>(s.overlap_matrix.cols()));
    for (Eigen::Index i = 0; i < s.overlap_matrix.cols(); ++i) row[static_cast<std::size_t>(i)] = s.overlap_matrix(a, i);
    overlaps.push_back(row);
  }
  Json result = {{"k", cfg.k()},
                 {"sigma_min", cfg.sigma_min()},
                 {"eigenvalues", s.eigenvalues},
                 {"residuals", s.residuals},
                 {"lambda_min", s.eigenvalues.front()},
                 {"near_kernel_count", s.near_kernel_count},
                 {"overlaps", overlaps},
                 {"restarts", s.restarts},
                 {"alpha", run.basis.alpha},
                 {"alignment_residual", run.basis.alignment_residual},
                 {"principal_angles", run.basis.principal_angles}};
  if (c.weighted_report) {
    Json rep = Json::array();
    for (std::size_t a = 0; a < s.eigenvectors.size(); ++a) {
      Json per = Json::array();
      for (double eta : {0.3, 0.5, 0.7}) per.push_back(weighted_json(weighted_norms(s.eigenvectors[a], cfg, eta)));
      rep.push_back({{"eigenvalue", s.eigenvalues[a]}, {"norms", per}});
    }
    result["weighted_report"] = rep;
  }
  return result;
}

Json run_reduce(const RunConfig& c, RunOutput& out) {
  const auto profile = desk_profile(c);
  const PeakConfiguration cfg = make_config(c, c.epsilon);
  const AnsatzBundle b = build_ansatz(cfg, profile, make_grid(c, c.epsilon));
  const int count = c.count > 0 ? c.count : 2 * cfg.k() + 2;
  EigenOptions eopts;
  eopts.seed = c.seed;
  const NearKernelRun run = compute_near_kernel(b, count, 1e-9, eopts);
  const ReductionState st = solve_correction(b, run.basis, resolved_tol(c));
  std::vector<double> integral, relative;
  for (int i = 0; i < cfg.k(); ++i) {
    integral.push_back(interaction_d(b, run.basis, i));
    const double direct = st.d_coeffs[static_cast<std::size_t>(i)];
    relative.push_back(direct != 0.0 ? std::abs(integral.back() - direct) / std::abs(direct) : 0.0);
  }
  std::ostringstream csv;
  csv << "iteration,increment\n";
  for (std::size_t n = 0; n < st.increments.size(); ++n) csv << n + 1 << ',' << csv_double(st.increments[n]) << '\n';
  out.tables.emplace_back("reduce_trace.csv", csv.str());
  const double scale = interaction_scale(cfg.sigma_min());
  Json result = {{"k", cfg.k()},
                 {"sigma_min", cfg.sigma_min()},
                 {"interaction_scale", scale},
                 {"residual", residual_json(residual_l2(b))},
                 {"d_projection", st.d_coeffs},
                 {"d_leading", st.d_leading},
                 {"d_interaction", integral},
                 {"d_relative_difference", relative},
                 {"multipliers", st.multipliers},
                 {"v_sup", st.v_sup},
                 {"v_h1", st.v_h1},
                 {"v_ratio", st.v_sup / scale},
                 {"max_orthogonality", st.max_orthogonality},
                 {"constrained_residual", st.constrained_residual},
                 {"iterations", st.iterations},
                 {"increments", st.increments}};
  if (c.weighted_report) {
    const GridField h = reduction_rhs(b, st.correction);
    Json rep = Json::array();
    for (double eta : {0.3, 0.5, 0.7}) {
      const WeightedReport w = weighted_report(h, st.correction, cfg, eta);
      rep.push_back({{"eta", eta},
                     {"input", w.input_weighted_norm},
                     {"output", w.output_weighted_norm},
                     {"ratio", w.ratio}});
    }
    result["weighted_report"] = rep;
  }
  return result;
}

Json run_equilibrate(const RunConfig& c, RunOutput& out) {
  const auto profile = desk_profile(c);
  const PeakConfiguration initial = make_config(c, c.epsilon);
  EquilibrateOptions opts;
  opts.tol = resolved_tol(c);
  opts.eigen_count = c.count;
  const EquilibrateResult e = equilibrate(initial, profile, make_grid(c, c.epsilon), opts);
  const double T = e.config.period();
  double dev = 0.0;
  for (double g : e.config.gaps()) dev = std::max(dev, std::abs(g / (T / e.config.k()) - 1.0));
  std::ostringstream csv;
  csv << "iteration";
  for (int i = 0; i < e.config.k(); ++i) csv << ",d_" << i + 1;
  for (int i = 0; i < e.config.k(); ++i) csv << ",x_" << i + 1;
  csv << '\n';
  for (std::size_t n = 0; n < e.d_trace.size(); ++n) {
    csv << n;
    for (double d : e.d_trace[n]) csv << ',' << csv_double(d);
    for (double x : e.position_trace[n]) csv << ',' << csv_double(x);
    csv << '\n';
  }
  out.tables.emplace_back("equilibrate_trace.csv", csv.str());
  return {{"initial_positions", initial.positions()},
          {"positions", e.config.positions()},
          {"gaps", e.config.gaps()},
          {"spacing_deviation", dev},
          {"d", e.d},
          {"newton_steps", e.newton_steps},
          {"evaluations", e.evaluations},
          {"d_trace", e.d_trace},
          {"position_trace", e.position_trace}};
}

Json run_dancer(const RunConfig& c, RunOutput& out) {
  const auto profile = desk_profile(c);
  NewtonOptions opts;
  opts.tol = resolved_tol(c);
  const bool relaxed = c.perturbation != 0.0 || !c.peaks.empty();
  std::vector<DancerSolution> sols;
  Json per = Json::array();
  std::ostringstream csv;
  csv << "epsilon,iterations,final_residual,psi_sup,evenness,period_difference\n";
  int index = 0;
  for (double eps : epsilons(c)) {
    DancerSolution s = relaxed ? relax_and_solve(make_config(c, eps), profile, make_grid(c, eps), 0, opts)
                               : dancer_with_psi(profile, eps, c.k, c.transverse_extent, c.spacing, opts);
    const EvennessReport ev = verify_evenness(s, opts.tol);
    const PeriodReport pr = verify_minimal_period(s, opts.tol);
    Json row = {{"epsilon", eps},
                {"converged", s.converged},
                {"iterations", s.iterations},
                {"newton_history", s.newton_history},
                {"relaxation_steps", s.relaxation_steps},
                {"positions", s.positions},
                {"min_value", s.min_value},
                {"evenness", {{"center", ev.center}, {"sup_difference", ev.sup_difference},
                              {"threshold", ev.threshold}, {"passed", ev.passed}}},
                {"period", {{"period_difference", pr.period_difference},
                            {"half_period_difference", pr.half_period_difference},
                            {"amplitude", pr.amplitude}, {"passed", pr.passed}}}};
    const double psi_sup = s.psi ? s.psi->sup_norm() : 0.0;
    if (s.psi) row["psi_sup"] = psi_sup;
    per.push_back(row);
    csv << csv_double(eps) << ',' << s.iterations << ',' << csv_double(s.newton_history.back()) << ','
        << csv_double(psi_sup) << ',' << csv_double(ev.sup_difference) << ','
        << csv_double(pr.period_difference) << '\n';
    if (c.snapshots) {
      out.fields.emplace_back("dancer_" + std::to_string(index) + ".mbf", s.field);
      if (s.psi) out.fields.emplace_back("psi_" + std::to_string(index) + ".mbf", *s.psi);
    }
    sols.push_back(std::move(s));
    ++index;
  }
  out.tables.emplace_back("dancer_sweep.csv", csv.str());
  Json result = {{"k", c.k}, {"solutions", per}};
  if (!relaxed && sols.size() >= 2) {
    const PsiFit fit = psi_decay_fit(sols, c.eta, c.eta_prime, c.exponent);
    Json pts = Json::array();
    for (const PsiFitPoint& p : fit.points)
      pts.push_back({{"epsilon", p.epsilon},
                     {"abscissa", p.abscissa},
                     {"W", p.weighted_sup},
                     {"psi_sup", p.psi_sup},
                     {"psi_at_peak", p.psi_at_peak}});
    result["psi_fit"] = {{"eta", fit.eta},
                         {"eta_prime", fit.eta_prime},
                         {"points", pts},
                         {"slope", fit.slope},
                         {"intercept", fit.intercept},
                         {"predicted_slope", fit.predicted_slope},
                         {"monotone", fit.monotone}};
  }
  return result;
}

CellKind parse_cell(const std::string& s) {
  if (s == "cell") return CellKind::Cell;
  if (s == "half") return CellKind::HalfCell;
  return CellKind::WholeSpace;
}

Json run_oracle(const RunConfig& c, RunOutput& out) {
  if (c.oracle == "taylor") {
    const TaylorCheck t = taylor_remainder_check(c.samples, c.exponent, c.seed);
    return {{"p", t.p},
            {"order", t.order},
            {"samples", t.samples},
            {"seed", t.seed},
            {"max_ratio", t.max_ratio},
            {"argmax_a", t.argmax_a},
            {"argmax_b", t.argmax_b},
            {"b_zero_ratio", taylor_remainder_ratio(1.0, 0.0, c.exponent)}};
  }
  const CellKind cell = parse_cell(c.cell);
  InteractionSpec spec;
  double tail = 1.0;
  std::unique_ptr<GroundStateProfile> profile;
  if (c.shape == "exponential") {
    spec = exponential_interaction(c.a, c.b, c.separations.front(), cell);
  } else {
    profile = std::make_unique<GroundStateProfile>(solve_ground_state(c.dimension, c.exponent, kProfileTol));
    spec = profile_interaction(*profile, c.a, c.b, c.separations.front(), cell, c.shape == "ground-derivative");
    tail = profile->tail_L0;
  }
  const InteractionLimit lim = interaction_limit(spec, c.separations, tail);
  Json pts = Json::array();
  std::ostringstream csv;
  csv << "y0,value,rescaled\n";
  for (const LimitPoint& p : lim.points) {
    Json row = {{"y0", p.y0}, {"value", p.value}, {"rescaled", p.rescaled}};
    if (c.shape == "exponential" && cell == CellKind::WholeSpace)
      row["closed_form"] = exponential_interaction_exact(c.a, c.b, p.y0);
    pts.push_back(row);
    csv << csv_double(p.y0) << ',' << csv_double(p.value) << ',' << csv_double(p.rescaled) << '\n';
  }
  out.tables.emplace_back("oracle_interactions.csv", csv.str());
  return {{"points", pts},
          {"tail_L", lim.tail_L},
          {"C0", lim.C0},
          {"stated_limit", lim.stated_limit},
          {"pointwise_limit", lim.pointwise_limit},
          {"extrapolated", lim.extrapolated},
          {"monotone", lim.monotone}};
}

Json run_check(const RunConfig& c, RunOutput& out) {
  const CriterionResult r = run_criterion(c.criterion);
  out.assertion_failed = !r.passed;
  return {{"criterion", r.id}, {"title", r.title}, {"passed", r.passed}, {"summary", r.summary},
          {"metrics", r.metrics}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("out_dir: cannot write " + path.string());
  f << text;
}

}  // namespace

double resolved_tol(const RunConfig& c) {
  if (c.tol) return *c.tol;
  if (c.command == "reduce" || c.command == "dancer") return 1e-10;
  if (c.command == "equilibrate") return 1e-6;
  return 1e-9;
}

Json config_to_json(const RunConfig& c) {
  Json j = {{"command", c.command},
            {"dimension", c.dimension},
            {"exponent", c.exponent},
            {"tol", resolved_tol(c)},
            {"epsilon", c.epsilon},
            {"eps_sweep", c.eps_sweep},
            {"peaks", c.peaks},
            {"k", c.k},
            {"perturbation", c.perturbation},
            {"sigma_sweep", c.sigma_sweep},
            {"spacing", c.spacing},
            {"transverse_extent", c.transverse_extent},
            {"count", c.count},
            {"eta", c.eta},
            {"eta_prime", c.eta_prime},
            {"weighted_report", c.weighted_report},
            {"snapshots", c.snapshots},
            {"seed", c.seed}};
  if (c.command == "oracle") {
    j["oracle"] = c.oracle;
    j["a"] = c.a;
    j["b"] = c.b;
    j["separations"] = c.separations;
    j["shape"] = c.shape;
    j["cell"] = c.cell;
    j["samples"] = c.samples;
  }
  if (c.command == "check") j["criterion"] = c.criterion;
  return j;
}

void validate(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
    throw ConfigError("command: unknown subcommand '" + c.command + "'");
  if (c.command == "check") {
    if (c.criterion < 1 || c.criterion > 13) throw ConfigError("criterion: must be in 1..13");
    return;
  }
  if (!(c.exponent >= 2.0)) throw ConfigError("exponent: p >= 2 required");
  if (c.dimension < 1 || c.dimension > 3) throw ConfigError("dimension: N in {1, 2, 3} required");
  if (!exponent_is_admissible(c.dimension, c.exponent))
    throw ConfigError("exponent: p < (N+2)/(N-2) required (subcritical)");
  if (c.tol && !(*c.tol > 0.0)) throw ConfigError("tol: tol > 0 required");
  const bool on_grid = c.command != "groundstate" && c.command != "oracle";
  if (on_grid) {
    if (c.dimension != 2) throw ConfigError("dimension: N = 2 required for strip computations");
    if (!(c.epsilon > 0.0)) throw ConfigError("epsilon: epsilon > 0 required");
    if (!c.eps_sweep.empty())
      for (double e : parse_sweep(c.eps_sweep))
        if (!(e > 0.0)) throw ConfigError("eps_sweep: every epsilon > 0 required");
    if (c.k < 1) throw ConfigError("k: k >= 1 required");
    if (!(c.spacing > 0.0)) throw ConfigError("spacing: spacing > 0 required");
    if (!(c.transverse_extent > 0.0)) throw ConfigError("transverse_extent: R > 0 required");
    if (c.count < 0) throw ConfigError("count: count >= 0 required");
    if (!(std::abs(c.perturbation) < 0.5)) throw ConfigError("perturbation: |perturbation| < 0.5 required");
    for (double s : c.sigma_sweep)
      if (!(s > 1.0)) throw ConfigError("sigma_sweep: every half-gap > 1 required");
    // Peak placement and separation are checked by PeakConfiguration itself.
    for (double eps : epsilons(c)) make_config(c, eps);
  }
  if (c.command == "equilibrate" && peak_count(c) < 2) throw ConfigError("k: k >= 2 required for equilibrate");
  if (c.command == "dancer") {
    if (!(c.eta > 0.0 && c.eta < 1.0)) throw ConfigError("eta: 0 < eta < 1 required");
    if (!(c.eta_prime > 0.0 && c.eta_prime < 1.0)) throw ConfigError("eta_prime: 0 < eta_prime < 1 required");
    if (!(c.eta_prime < c.exponent - 1.0 - c.eta))
      throw ConfigError("eta_prime: eta_prime < p - 1 - eta required");
  }
  if (c.command == "oracle") {
    if (c.oracle != "interactions" && c.oracle != "taylor")
      throw ConfigError("oracle: one of interactions, taylor required");
    if (c.oracle == "taylor" && c.samples < 1) throw ConfigError("samples: samples >= 1 required");
    if (c.oracle == "interactions") {
      if (!(c.b > 0.0 && c.a > c.b)) throw ConfigError("a, b: a > b > 0 required");
      if (c.separations.size() < 2) throw ConfigError("separations: at least two values required");
      for (double y : c.separations)
        if (!(y > 0.0)) throw ConfigError("separations: every y0 > 0 required");
      if (c.shape != "ground" && c.shape != "ground-derivative" && c.shape != "exponential")
        throw ConfigError("shape: one of ground, ground-derivative, exponential required");
      if (c.cell != "cell" && c.cell != "half" && c.cell != "whole")
        throw ConfigError("cell: one of cell, half, whole required");
    }
  }
}

std::string input_hash(const RunConfig& c) {
  const std::string text = config_to_json(c).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalError("sha256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

RunOutput run(const RunConfig& c) {
  validate(c);
  RunOutput out;
  Json result;
  if (c.command == "groundstate") result = run_groundstate(c, out);
  else if (c.command == "ansatz") result = run_ansatz(c, out);
  else if (c.command == "spectrum") result = run_spectrum(c, out);
  else if (c.command == "reduce") result = run_reduce(c, out);
  else if (c.command == "equilibrate") result = run_equilibrate(c, out);
  else if (c.command == "dancer") result = run_dancer(c, out);
  else if (c.command == "oracle") result = run_oracle(c, out);
  else result = run_check(c, out);
  out.summary = {{"command", c.command},
                 {"config", config_to_json(c)},
                 {"input_hash", input_hash(c)},
                 {"result", std::move(result)}};
  return out;
}

std::string dump_summary(const Json& summary) { return summary.dump(2) + "\n"; }

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  auto report = [&](const char* kind, const std::string& message, int code) {
    err << Json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
  };
  try {
    const RunOutput r = run(c);
    const std::string text = dump_summary(r.summary);
    out << text;
    std::filesystem::path summary_path = c.out;
    if (!c.out_dir.empty()) {
      const std::filesystem::path dir(c.out_dir);
      std::filesystem::create_directories(dir);
      if (summary_path.empty()) summary_path = dir / (c.command + ".json");
      for (const auto& [name, csv] : r.tables) write_file(dir / name, csv);
      for (const auto& [name, field] : r.fields) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw ConfigError("out_dir: cannot write " + (dir / name).string());
        write_field_binary(field, f);
      }
    }
    if (!summary_path.empty()) write_file(summary_path, text);
    if (r.assertion_failed) return report("assertion", r.summary["result"]["summary"].get<std::string>(), kExitAssertion);
    return kExitOk;
  } catch (const ConfigError& e) {
    return report("config", e.what(), kExitConfig);
  } catch (const NumericalError& e) {
    return report("numerical", e.what(), kExitNumerical);
  } catch (const AssertionFailure& e) {
    return report("assertion", e.what(), kExitAssertion);
  } catch (const std::filesystem::filesystem_error& e) {
    return report("config", e.what(), kExitConfig);
  }
}

}  // namespace multibump
