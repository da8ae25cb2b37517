// Command-line entry point: one subcommand per workflow, options from flags or
// a config file (--config run.toml, one [section] per subcommand).

#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "multibump/runner.hpp"

using multibump::RunConfig;

namespace {

void common(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--p,--exponent", c.exponent, "nonlinearity exponent p >= 2")->capture_default_str();
  cmd->add_option("--tol", c.tol, "solver tolerance (per-command default when omitted)");
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  cmd->add_option("--out", c.out, "summary JSON path");
  cmd->add_option("--out-dir", c.out_dir, "directory for the summary, CSV tables and snapshots")
      ->envname("MULTIBUMP_OUT_DIR");
}

void strip(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--eps,--epsilon", c.epsilon, "epsilon")->capture_default_str();
  cmd->add_option("--peaks", c.peaks, "peak angles in [-pi, pi), comma separated")->delimiter(',');
  cmd->add_option("--k", c.k, "number of uniform peaks")->capture_default_str();
  cmd->add_option("--perturb", c.perturbation, "random peak displacement relative to T/k")
      ->capture_default_str();
  cmd->add_option("--spacing", c.spacing, "max grid spacing")->capture_default_str();
  cmd->add_option("--extent", c.transverse_extent, "transverse extent")->capture_default_str();
  cmd->add_option("--count", c.count, "eigenpairs (0 = 2k+2)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-peak solutions of -Δu + u = u₊^p on a periodic strip"};
  app.set_config("--config", "", "read options from a config file");
  app.require_subcommand(1);
  RunConfig c;

  auto* gs = app.add_subcommand("groundstate", "radial ground state U");
  common(gs, c);
  gs->add_option("--dim,--dimension", c.dimension, "space dimension N")->capture_default_str();

  auto* an = app.add_subcommand("ansatz", "residual of the multi-peak ansatz");
  common(an, c);
  strip(an, c);
  an->add_option("--eps-sweep", c.eps_sweep, "start:stop:count");
  an->add_option("--sigma-sweep", c.sigma_sweep, "half-gaps of uniform configurations")->delimiter(',');

  auto* sp = app.add_subcommand("spectrum", "lowest eigenpairs of the linearized operator");
  common(sp, c);
  strip(sp, c);
  sp->add_flag("--weighted-report", c.weighted_report, "weighted sup norms of the eigenvectors");

  auto* rd = app.add_subcommand("reduce", "Lyapunov-Schmidt correction and d_i");
  common(rd, c);
  strip(rd, c);
  rd->add_flag("--weighted-report", c.weighted_report, "weighted norms of h and v");

  auto* eq = app.add_subcommand("equilibrate", "solve d_i = 0 for the peak positions");
  common(eq, c);
  strip(eq, c);

  auto* dn = app.add_subcommand("dancer", "Newton solve for the periodic solution");
  common(dn, c);
  strip(dn, c);
  dn->add_option("--eps-sweep", c.eps_sweep, "start:stop:count");
  dn->add_option("--eta", c.eta, "weight exponent")->capture_default_str();
  dn->add_option("--eta-prime", c.eta_prime, "rate exponent")->capture_default_str();
  dn->add_flag("--snapshots", c.snapshots, "write field snapshots to --out-dir");

  auto* orc = app.add_subcommand("oracle", "interaction integrals and the Taylor remainder");
  orc->require_subcommand(1);
  auto* oi = orc->add_subcommand("interactions", "rescaled interaction integrals");
  common(oi, c);
  oi->add_option("--dim,--dimension", c.dimension, "space dimension N")->capture_default_str();
  oi->add_option("--a", c.a, "exponent of f")->capture_default_str();
  oi->add_option("--b", c.b, "exponent of g")->capture_default_str();
  oi->add_option("--y0", c.separations, "separations, comma separated")->delimiter(',');
  oi->add_option("--shape", c.shape, "ground | ground-derivative | exponential")->capture_default_str();
  oi->add_option("--cell", c.cell, "cell | half | whole")->capture_default_str();
  auto* ot = orc->add_subcommand("taylor", "random Taylor remainder ratios");
  common(ot, c);
  ot->add_option("--n,--samples", c.samples, "sample count")->capture_default_str();

  auto* ck = app.add_subcommand("check", "run one acceptance check");
  common(ck, c);
  ck->add_option("criterion", c.criterion, "criterion number 1..13")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << nlohmann::json{{"error", "config"}, {"message", e.what()}, {"exit_code", 2}}.dump() << '\n';
    return multibump::kExitConfig;
  }

  for (CLI::App* sub : app.get_subcommands()) c.command = sub->get_name();
  if (c.command == "oracle") c.oracle = orc->get_subcommands().front()->get_name();
  return multibump::execute(c, std::cout, std::cerr);
}
