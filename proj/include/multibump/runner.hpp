#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "multibump/domain.hpp"

namespace multibump {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitAssertion = 4,
};

/// Resolved parameters of one invocation. Fields a subcommand does not use are
/// ignored by it but still recorded.
struct RunConfig {
  std::string command;  // groundstate ansatz spectrum reduce equilibrate dancer oracle check
  std::string oracle;   // interactions | taylor

  int dimension = 2;
  double exponent = 3.0;
  /// Per-command default when unset: groundstate 1e-9, spectrum 1e-9,
  /// reduce 1e-10, equilibrate 1e-6 (relative to e^{-2σ̲}σ̲^{-1/2}),
  /// dancer 1e-10.
  std::optional<double> tol;

  double epsilon = 0.3;
  std::string eps_sweep;             // "start:stop:count"
  std::vector<double> peaks;         // angles a^i in [-π, π)
  int k = 1;
  double perturbation = 0.0;         // relative to T/k
  std::vector<double> sigma_sweep;   // uniform configurations with these half-gaps

  double spacing = 0.2;
  double transverse_extent = 14.0;
  int count = 0;  // eigenpairs, 0 = 2k + 2

  double eta = 0.3;
  double eta_prime = 0.65;
  bool weighted_report = false;
  bool snapshots = false;

  double a = 2.0;
  double b = 1.0;
  std::vector<double> separations{8.0, 10.0, 12.0, 16.0};
  std::string shape = "ground";  // ground | ground-derivative | exponential
  std::string cell = "cell";     // cell | half | whole

  long samples = 100000;
  int criterion = 0;
  std::uint64_t seed = 20240601;

  std::string out;      // summary path, empty = <out_dir>/<command>.json
  std::string out_dir;  // empty = no files
};

/// Resolved inputs as JSON (output locations excluded).
nlohmann::json config_to_json(const RunConfig& config);

/// Throws ConfigError naming the first violated constraint.
void validate(const RunConfig& config);

/// Tolerance after applying the per-command default.
double resolved_tol(const RunConfig& config);

/// Hex SHA-256 of the compact dump of config_to_json.
std::string input_hash(const RunConfig& config);

struct RunOutput {
  nlohmann::json summary;
  std::vector<std::pair<std::string, std::string>> tables;  // file name, CSV text
  std::vector<std::pair<std::string, GridField>> fields;    // file name, snapshot
  /// A `check` that ran to completion but failed.
  bool assertion_failed = false;
};

/// Validates, computes and assembles the summary
/// {command, config, input_hash, result}. Throws ConfigError or
/// NumericalError.
RunOutput run(const RunConfig& config);

/// Two-space indented dump with a trailing newline.
std::string dump_summary(const nlohmann::json& summary);

/// run() plus file output and error reporting: the summary goes to `out`
/// (and to files when an output directory is set), errors go to `err` as a
/// JSON object {"error": kind, "message": ...}. Returns an ExitCode.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace multibump
