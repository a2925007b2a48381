// Command-line front end. All numerics live behind the C API in libfklab;
// this binary only merges configuration sources and reports results.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fklab.h"

namespace {

using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::optional<int> n;
  std::optional<double> theta, p, q, T, dt;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its keys");
  cmd->add_option("--n", f.n, "grid resolution (even, >= 8)");
  cmd->add_option("--theta", f.theta, "filtration ratio in [0, 1]");
  cmd->add_option("--p", f.p, "time exponent (> 1)");
  cmd->add_option("--q", f.q, "space exponent (> 1)");
  cmd->add_option("--T", f.T, "time horizon");
  cmd->add_option("--dt", f.dt, "time step");
  cmd->add_option("--seed", f.seed, "seed for randomized checks");
  cmd->add_option("--jobs", f.jobs, "worker threads for sweeps (0 = auto)");
  cmd->add_option("--out", f.out, "output directory (FKLAB_OUT overrides)");
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read config file '" << path << "'\n";
    std::exit(FKLAB_CONFIG_ERROR);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::exception& e) {
    std::cerr << "error: config file is not valid JSON: " << e.what() << "\n";
    std::exit(FKLAB_CONFIG_ERROR);
  }
}

json merge(const CommonFlags& f, json overrides) {
  json merged = json::object();
  if (!f.config_path.empty()) merged = load_config_file(f.config_path);
  if (!merged.is_object()) {
    std::cerr << "error: config file must hold a JSON object\n";
    std::exit(FKLAB_CONFIG_ERROR);
  }
  if (f.n) overrides["n"] = *f.n;
  if (f.theta) overrides["theta"] = *f.theta;
  if (f.p) overrides["p"] = *f.p;
  if (f.q) overrides["q"] = *f.q;
  if (f.T) overrides["T"] = *f.T;
  if (f.dt) overrides["dt"] = *f.dt;
  if (f.seed) overrides["seed"] = *f.seed;
  if (f.jobs) overrides["jobs"] = *f.jobs;
  if (f.out) overrides["out"] = *f.out;
  for (const auto& [key, value] : overrides.items()) merged[key] = value;
  return merged;
}

int execute(const std::string& command, const json& merged) {
  fklab_run* run = nullptr;
  fklab_status status = fklab_run_create(command.c_str(), merged.dump().c_str(), &run);
  if (status != FKLAB_OK) {
    std::cerr << "error: " << fklab_last_error() << "\n";
    return status;
  }
  status = fklab_run_execute(run);
  const char* summary = fklab_run_summary_json(run);
  if (summary != nullptr) {
    if (command == "verify") {
      const json report = json::parse(summary);
      for (const auto& chk : report["checks"]) {
        std::printf("[%s] %s/%s  measured=%.6g threshold=%.6g\n",
                    chk["pass"].get<bool>() ? "PASS" : "FAIL",
                    chk["module"].get<std::string>().c_str(),
                    chk["name"].get<std::string>().c_str(), chk["measured"].get<double>(),
                    chk["threshold"].get<double>());
      }
      std::printf("verify: %s (%zu checks)\n",
                  report["all_pass"].get<bool>() ? "all checks passed" : "FAILURES present",
                  report["checks"].size());
    } else {
      std::cout << summary << "\n";
    }
  }
  if (status != FKLAB_OK) {
    const char* msg = fklab_run_error(run);
    if (msg != nullptr && *msg != '\0') std::cerr << "error: " << msg << "\n";
  }
  fklab_run_destroy(run);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for 1D diffusion with coupled two-endpoint "
               "(filtration) boundary conditions and a dynamic boundary unknown"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fklab_version()));

  CommonFlags flags;
  json overrides = json::object();

  auto* spectrum = app.add_subcommand("spectrum", "discrete spectrum against the transcendental frequencies");
  add_common(spectrum, flags);
  std::string theta_sweep;
  spectrum->add_option("--theta-sweep", theta_sweep, "from:to:count sweep of theta");
  int modes = 0;
  spectrum->add_option("--modes", modes, "lowest modes to report");

  auto* resolvent = app.add_subcommand("resolvent", "sector sweep of the scaled resolvent norm");
  add_common(resolvent, flags);
  double theta0 = -1.0;
  resolvent->add_option("--theta0", theta0, "frozen filtration ratio");
  std::string moduli;
  resolvent->add_option("--moduli", moduli, "from:to:count moduli (log-spaced)");

  auto* simulate = app.add_subcommand("simulate", "IMEX time integration of the coupled system");
  add_common(simulate, flags);
  auto* fixedpoint = app.add_subcommand("fixedpoint", "Picard solve of the transformed system");
  add_common(fixedpoint, flags);
  std::optional<double> frozen_theta;
  bool linear = false;
  std::string v0;
  std::optional<double> amplitude, sigma0, tol;
  std::optional<int> max_iter;
  for (CLI::App* cmd : {simulate, fixedpoint}) {
    cmd->add_option("--frozen-theta", frozen_theta, "freeze the filtration ratio");
    cmd->add_flag("--linear", linear, "drop the reaction terms");
    cmd->add_option("--v0", v0, "initial data preset: cosine_bump | zero | eigen1");
    cmd->add_option("--amplitude", amplitude, "initial data amplitude");
    cmd->add_option("--sigma0", sigma0, "initial boundary concentration");
  }
  fixedpoint->add_option("--tol", tol, "Picard defect tolerance");
  fixedpoint->add_option("--max-iter", max_iter, "Picard iteration cap");

  auto* sweep = app.add_subcommand("sweep", "parallel parameter sweep");
  add_common(sweep, flags);
  std::string what;
  sweep->add_option("--what", what, "spectrum | simulate");
  sweep->add_option("--theta-sweep", theta_sweep, "from:to:count sweep of theta");

  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  add_common(verify, flags);
  std::string only;
  verify->add_option("--only", only, "restrict to one module");

  CLI11_PARSE(app, argc, argv);

  if (!theta_sweep.empty()) overrides["theta_sweep"] = theta_sweep;
  if (modes > 0) overrides["modes"] = modes;
  if (theta0 >= 0.0) overrides["theta0"] = theta0;
  if (!moduli.empty()) overrides["moduli"] = moduli;
  if (frozen_theta) overrides["frozen_theta"] = *frozen_theta;
  if (linear) overrides["linear"] = true;
  if (!v0.empty()) overrides["v0"] = v0;
  if (amplitude) overrides["amplitude"] = *amplitude;
  if (sigma0) overrides["sigma0"] = *sigma0;
  if (tol) overrides["tol"] = *tol;
  if (max_iter) overrides["max_iter"] = *max_iter;
  if (!only.empty()) overrides["only"] = only;
  if (!what.empty()) overrides["what"] = what;

  const std::string command = app.get_subcommands().front()->get_name();
  return execute(command, merge(flags, overrides));
}
