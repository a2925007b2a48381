#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/grid.hpp"

namespace fklab {

struct SweepRange {
  double from = 0.1;
  double to = 1.0;
  int count = 10;

  static SweepRange parse(const std::string& spec);  // "from:to:count"
  std::string str() const;
  std::vector<double> values() const;
};

/// Flat run configuration: JSON file merged with flag overrides (flags win),
/// unknown keys rejected per command. FKLAB_OUT overrides the out directory.
struct RunConfig {
  std::string command;

  // common
  int n = 200;
  double p = 2.0;
  double q = 2.0;
  double T = 0.05;
  double dt = 5e-4;
  std::uint64_t seed = 1;
  int jobs = 0;  ///< 0 = hardware concurrency
  std::string out = "out";

  // spectrum / sweep
  double theta = 1.0;
  std::optional<SweepRange> theta_sweep;
  int modes = 3;

  // resolvent
  double theta0 = 0.5;
  SweepRange moduli{0.1, 1000.0, 10};

  // simulate / fixedpoint
  std::optional<double> frozen_theta;
  bool linear = false;
  std::string v0 = "cosine_bump";  ///< cosine_bump | zero | eigen1
  double amplitude = 0.1;
  double sigma0 = 0.5;
  double theta_min = 0.05, theta_max = 0.95, steepness = 4.0, center = 1.0;
  double tol = 1e-10;
  int max_iter = 30;

  // verify
  std::string only;

  // sweep
  std::string what = "spectrum";

  static RunConfig from_json(const std::string& command, const nlohmann::json& merged);
  nlohmann::json to_json() const;
  std::string run_id() const;
};

struct RunResult {
  int exit_code = 0;  ///< 0 ok, 1 verify failure, 3 numeric failure
  nlohmann::json summary;
};

/// Execute a parsed command; writes CSV/JSON artifacts under config.out.
/// ConfigError propagates (exit code 2 at the API boundary).
RunResult run_command(const RunConfig& config);

struct VerifyCheck {
  std::string module;
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

/// The invariant suites of every module; honors config.only as a module
/// filter and the FKLAB_FAULT=psi_linear fault injection hook.
std::vector<VerifyCheck> run_verify_suite(const RunConfig& config);

std::string format_g17(double v);

}  // namespace fklab
