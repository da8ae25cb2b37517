#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "multibump/error.hpp"
#include "multibump/runner.hpp"

using namespace multibump;

TEST_CASE("groundstate summary") {
  RunConfig c;
  c.command = "groundstate";
  c.dimension = 1;
  const RunOutput r = run(c);
  CHECK(r.summary["result"]["center_value"].get<double>() == doctest::Approx(1.4142136).epsilon(1e-7));
  CHECK(r.summary["config"]["dimension"] == 1);
  CHECK(r.summary["input_hash"].get<std::string>().size() == 64);
}

TEST_CASE("spectrum summary") {
  RunConfig c;
  c.command = "spectrum";
  c.k = 1;
  c.epsilon = 0.3;
  const RunOutput r = run(c);
  CHECK(r.summary["result"]["lambda_min"].get<double>() == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(r.summary["result"]["near_kernel_count"] == 1);
}

TEST_CASE("config rejection names the constraint") {
  RunConfig c;
  c.command = "groundstate";
  c.exponent = 1.5;
  try {
    validate(c);
    FAIL("no exception");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("p >= 2") != std::string::npos);
  }
  std::ostringstream out, err;
  CHECK(execute(c, out, err) == kExitConfig);
  CHECK(err.str().find("\"error\":\"config\"") != std::string::npos);
  CHECK(out.str().empty());

  RunConfig d;
  d.command = "dancer";
  d.eta = 0.5;
  d.eta_prime = 0.9;
  d.exponent = 2.0;
  CHECK_THROWS_AS(validate(d), ConfigError);
  RunConfig e;
  e.command = "ansatz";
  e.peaks = {0.0, 0.1};
  CHECK_THROWS_AS(validate(e), ConfigError);
  RunConfig f;
  f.command = "dancer";
  f.eps_sweep = "0.35:0.2";
  CHECK_THROWS_AS(validate(f), ConfigError);
  RunConfig g;
  g.command = "nope";
  CHECK_THROWS_AS(validate(g), ConfigError);
}

TEST_CASE("numerical failure exit code") {
  RunConfig c;
  c.command = "groundstate";
  c.tol = 1e-30;
  std::ostringstream out, err;
  CHECK(execute(c, out, err) == kExitNumerical);
}

TEST_CASE("identical config gives bit-identical summaries and files") {
  RunConfig c;
  c.command = "oracle";
  c.oracle = "taylor";
  c.samples = 5000;
  c.seed = 11;
  CHECK(dump_summary(run(c).summary) == dump_summary(run(c).summary));
  RunConfig d = c;
  d.seed = 12;
  CHECK(input_hash(c) != input_hash(d));
  // Output locations are not inputs.
  RunConfig e = c;
  e.out_dir = "/tmp/elsewhere";
  CHECK(input_hash(c) == input_hash(e));

  const auto dir = std::filesystem::temp_directory_path() / "multibump_runner_test";
  std::filesystem::remove_all(dir);
  RunConfig w;
  w.command = "oracle";
  w.oracle = "interactions";
  w.dimension = 1;
  w.shape = "exponential";
  w.cell = "whole";
  w.out_dir = dir.string();
  std::ostringstream out, err;
  CHECK(execute(w, out, err) == kExitOk);
  CHECK(std::filesystem::exists(dir / "oracle.json"));
  CHECK(std::filesystem::exists(dir / "oracle_interactions.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep parsing and tolerance defaults") {
  RunConfig c;
  c.command = "equilibrate";
  c.k = 2;
  CHECK(resolved_tol(c) == 1e-6);
  c.command = "dancer";
  CHECK(resolved_tol(c) == 1e-10);
  c.tol = 1e-7;
  CHECK(resolved_tol(c) == 1e-7);
  c.command = "ansatz";
  c.eps_sweep = "0.3:0.2:3";
  c.k = 1;
  const RunOutput r = run(c);
  REQUIRE(r.summary["result"]["rows"].size() == 3);
  CHECK(r.summary["result"]["rows"][1]["epsilon"].get<double>() == doctest::Approx(0.25));
}
