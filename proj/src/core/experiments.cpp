#include "core/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "core/dynamics.hpp"
#include "core/fk_laplacian.hpp"
#include "core/resolvent.hpp"
#include "core/spectral.hpp"

namespace fklab {

using nlohmann::json;

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SweepRange SweepRange::parse(const std::string& spec) {
  SweepRange r;
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw ConfigError("sweep range must look like from:to:count, got '" + spec + "'");
  }
  try {
    r.from = std::stod(spec.substr(0, c1));
    r.to = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    r.count = std::stoi(spec.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ConfigError("sweep range must look like from:to:count, got '" + spec + "'");
  }
  if (r.count < 1 || !(r.to >= r.from)) throw ConfigError("sweep range: need from <= to, count >= 1");
  return r;
}

std::string SweepRange::str() const {
  return format_g17(from) + ":" + format_g17(to) + ":" + std::to_string(count);
}

std::vector<double> SweepRange::values() const {
  std::vector<double> out;
  if (count == 1) {
    out.push_back(from);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    out.push_back(from + (to - from) * i / (count - 1));
  }
  return out;
}

namespace {

std::vector<double> log_values(const SweepRange& r) {
  if (!(r.from > 0.0)) throw ConfigError("log sweep range needs from > 0");
  if (r.count == 1) return {r.from};
  std::vector<double> out;
  const double la = std::log(r.from), lb = std::log(r.to);
  for (int i = 0; i < r.count; ++i) {
    out.push_back(std::exp(la + (lb - la) * i / (r.count - 1)));
  }
  return out;
}

const std::vector<std::string> kCommonKeys = {"n",    "p",    "q",   "T",
                                              "dt",   "seed", "jobs", "out",
                                              "theta"};

std::vector<std::string> allowed_keys(const std::string& command) {
  std::vector<std::string> keys = kCommonKeys;
  auto add = [&](std::initializer_list<const char*> more) {
    for (const char* k : more) keys.emplace_back(k);
  };
  if (command == "spectrum") {
    add({"theta_sweep", "modes"});
  } else if (command == "resolvent") {
    add({"theta0", "moduli"});
  } else if (command == "simulate" || command == "fixedpoint") {
    add({"frozen_theta", "linear", "v0", "amplitude", "sigma0", "theta_min", "theta_max",
         "steepness", "center"});
    if (command == "fixedpoint") add({"tol", "max_iter"});
  } else if (command == "verify") {
    add({"only"});
  } else if (command == "sweep") {
    add({"what", "theta_sweep", "modes", "frozen_theta", "linear", "v0", "amplitude", "sigma0"});
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return keys;
}

void check_range(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& command, const json& merged) {
  if (!merged.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  c.command = command;
  const auto keys = allowed_keys(command);
  for (const auto& [key, value] : merged.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("config: unknown key '" + key + "' for command '" + command + "'");
    }
    (void)value;
  }
  auto get_double = [&](const char* k, double& dst) {
    if (merged.contains(k)) {
      if (!merged[k].is_number()) throw ConfigError(std::string("config: '") + k + "' must be a number");
      dst = merged[k].get<double>();
    }
  };
  auto get_int = [&](const char* k, int& dst) {
    if (merged.contains(k)) {
      if (!merged[k].is_number_integer()) throw ConfigError(std::string("config: '") + k + "' must be an integer");
      dst = merged[k].get<int>();
    }
  };
  auto get_string = [&](const char* k, std::string& dst) {
    if (merged.contains(k)) {
      if (!merged[k].is_string()) throw ConfigError(std::string("config: '") + k + "' must be a string");
      dst = merged[k].get<std::string>();
    }
  };

  get_int("n", c.n);
  get_double("p", c.p);
  get_double("q", c.q);
  get_double("T", c.T);
  get_double("dt", c.dt);
  if (merged.contains("seed")) {
    if (!merged["seed"].is_number_unsigned() && !merged["seed"].is_number_integer()) {
      throw ConfigError("config: 'seed' must be an integer");
    }
    c.seed = merged["seed"].get<std::uint64_t>();
  }
  get_int("jobs", c.jobs);
  get_string("out", c.out);
  get_double("theta", c.theta);
  if (merged.contains("theta_sweep")) {
    if (!merged["theta_sweep"].is_string()) throw ConfigError("config: 'theta_sweep' must be from:to:count");
    c.theta_sweep = SweepRange::parse(merged["theta_sweep"].get<std::string>());
  }
  get_int("modes", c.modes);
  get_double("theta0", c.theta0);
  if (merged.contains("moduli")) {
    if (!merged["moduli"].is_string()) throw ConfigError("config: 'moduli' must be from:to:count");
    c.moduli = SweepRange::parse(merged["moduli"].get<std::string>());
  }
  if (merged.contains("frozen_theta")) {
    if (!merged["frozen_theta"].is_number()) throw ConfigError("config: 'frozen_theta' must be a number");
    c.frozen_theta = merged["frozen_theta"].get<double>();
  }
  if (merged.contains("linear")) {
    if (!merged["linear"].is_boolean()) throw ConfigError("config: 'linear' must be a boolean");
    c.linear = merged["linear"].get<bool>();
  }
  get_string("v0", c.v0);
  get_double("amplitude", c.amplitude);
  get_double("sigma0", c.sigma0);
  get_double("theta_min", c.theta_min);
  get_double("theta_max", c.theta_max);
  get_double("steepness", c.steepness);
  get_double("center", c.center);
  get_double("tol", c.tol);
  get_int("max_iter", c.max_iter);
  get_string("only", c.only);
  get_string("what", c.what);

  if (const char* env = std::getenv("FKLAB_OUT"); env && *env) c.out = env;

  check_range(c.n >= 8 && c.n % 2 == 0, "n must be even and >= 8");
  check_range(c.p > 1.0 && c.q > 1.0, "p and q must exceed 1");
  check_range(c.T > 0.0 && c.dt > 0.0 && c.dt <= 0.1, "need T > 0 and 0 < dt <= 0.1");
  check_range(c.jobs >= 0, "jobs must be >= 0");
  check_range(c.theta >= 0.0 && c.theta <= 1.0, "theta must lie in [0, 1]");
  check_range(c.theta0 >= 0.0 && c.theta0 <= 1.0, "theta0 must lie in [0, 1]");
  check_range(c.modes >= 1, "modes must be >= 1");
  check_range(std::isfinite(c.amplitude), "amplitude must be finite");
  check_range(c.tol > 0.0 && c.max_iter >= 1, "need tol > 0, max_iter >= 1");
  if (c.frozen_theta) check_range(*c.frozen_theta >= 0.0 && *c.frozen_theta <= 1.0,
                                  "frozen_theta must lie in [0, 1]");
  if (c.theta_sweep) {
    check_range(c.theta_sweep->from >= 0.0 && c.theta_sweep->to <= 1.0,
                "theta_sweep must stay inside [0, 1]");
  }
  check_range(c.v0 == "cosine_bump" || c.v0 == "zero" || c.v0 == "eigen1",
              "v0 must be one of cosine_bump | zero | eigen1");
  if (c.command == "sweep") {
    check_range(c.what == "spectrum" || c.what == "simulate", "what must be spectrum | simulate");
  }
  return c;
}

json RunConfig::to_json() const {
  json j;
  j["n"] = n;
  j["p"] = p;
  j["q"] = q;
  j["T"] = T;
  j["dt"] = dt;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["out"] = out;
  if (command == "spectrum" || command == "sweep") {
    if (command == "spectrum") j["theta"] = theta;
    if (theta_sweep) j["theta_sweep"] = theta_sweep->str();
    j["modes"] = modes;
  }
  if (command == "resolvent") {
    j["theta0"] = theta0;
    j["moduli"] = moduli.str();
  }
  if (command == "simulate" || command == "fixedpoint" || command == "sweep") {
    if (frozen_theta) j["frozen_theta"] = *frozen_theta;
    j["linear"] = linear;
    j["v0"] = v0;
    j["amplitude"] = amplitude;
    j["sigma0"] = sigma0;
    if (command != "sweep") {
      j["theta_min"] = theta_min;
      j["theta_max"] = theta_max;
      j["steepness"] = steepness;
      j["center"] = center;
    }
  }
  if (command == "fixedpoint") {
    j["tol"] = tol;
    j["max_iter"] = max_iter;
  }
  if (command == "verify" && !only.empty()) j["only"] = only;
  if (command == "sweep") j["what"] = what;
  return j;
}

std::string RunConfig::run_id() const {
  const std::string blob = command + "|" + to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : blob) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericError("cannot open output file " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string csv_join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

ThetaProfile profile_from(const RunConfig& c) {
  if (c.frozen_theta) return ThetaProfile::constant(*c.frozen_theta);
  return ThetaProfile::logistic(c.theta_min, c.theta_max, c.steepness, c.center);
}

RealVec initial_state(const RunConfig& c, const Grid& grid, const ThetaProfile& profile) {
  if (c.v0 == "zero") return RealVec::Zero(grid.node_count());
  if (c.v0 == "cosine_bump") {
    RealVec v(grid.node_count());
    for (int i = 0; i < grid.node_count(); ++i) {
      v[i] = c.amplitude * (1.0 + std::cos(3.14159265358979323846 * grid.node(i)));
    }
    return v;
  }
  // slowest mode of the operator at the initial filtration ratio
  FkLaplacian op(grid, profile.theta(c.sigma0));
  EigenBasis basis(op);
  return c.amplitude * basis.mode(0);
}

struct SimulateRows {
  std::vector<std::string> lines;
  json summary;
  bool blew_up = false;
};

SimulateRows simulate_rows(const RunConfig& c, const Grid& grid, const ThetaProfile& profile) {
  const Nonlinearity nl = c.linear ? Nonlinearity::none() : Nonlinearity::typical();
  ImexSimulator sim(grid, profile, nl, c.dt);
  const RealVec v0 = initial_state(c, grid, profile);
  const RunOutcome outcome = sim.run(v0, c.sigma0, c.T);

  SimulateRows out;
  out.blew_up = outcome.blew_up;
  double min_norm = 0.0, max_norm = 0.0;
  for (std::size_t k = 0; k < outcome.traj.times.size(); ++k) {
    const double t = outcome.traj.times[k];
    const RealVec& v = outcome.traj.v[k];
    const double sigma = outcome.traj.sigma[k];
    const double th = profile.theta(sigma);
    const auto [b1, b2] = boundary_residuals(grid, th, v);
    const double nrm = lq_norm(grid, v, 2.0);
    if (k == 0) min_norm = max_norm = nrm;
    min_norm = std::min(min_norm, nrm);
    max_norm = std::max(max_norm, nrm);
    out.lines.push_back(csv_join({format_g17(t), format_g17(sigma), format_g17(th),
                                  format_g17(nrm), format_g17(energy_form(grid, v)),
                                  format_g17(v[grid.n()]), format_g17(v[0]),
                                  format_g17(b1), format_g17(b2)}));
  }
  out.summary["steps"] = outcome.traj.times.size() - 1;
  out.summary["blew_up"] = outcome.blew_up;
  if (outcome.blew_up) out.summary["message"] = outcome.message;
  if (!outcome.traj.sigma.empty()) {
    out.summary["sigma_final"] = outcome.traj.sigma.back();
    out.summary["v_l2_final"] = lq_norm(grid, outcome.traj.v.back(), 2.0);
    out.summary["v_l2_max"] = max_norm;
  }
  return out;
}

constexpr const char* kSimulateHeader =
    "# t,sigma,theta,v_l2,energy,trace_plus,trace_minus,b1_residual,b2_residual";

RunResult run_spectrum(const RunConfig& c) {
  const Grid grid = Grid::uniform(c.n);
  std::vector<double> thetas =
      c.theta_sweep ? c.theta_sweep->values() : std::vector<double>{c.theta};
  std::vector<std::string> lines;
  json per_theta = json::array();
  bool mu1_increasing = true;
  double prev_mu1 = -1.0;
  for (double th : thetas) {
    const FkLaplacian op(grid, th);
    const SpectrumReport rep = discrete_spectrum(op, c.modes);
    json entry;
    entry["theta"] = th;
    entry["lambda1"] = rep.matched.empty() ? 0.0 : rep.matched.front();
    entry["max_imag"] = rep.max_imag;
    json errs = json::array();
    for (int k = 0; k < c.modes; ++k) {
      lines.push_back(csv_join({format_g17(th), std::to_string(k + 1),
                                format_g17(rep.matched[k]), format_g17(rep.oracle[k]),
                                format_g17(rep.rel_error[k])}));
      errs.push_back(rep.rel_error[k]);
    }
    entry["rel_errors"] = errs;
    per_theta.push_back(entry);
    const double mu1 = eigen_frequency_oracle(th, 1);
    if (prev_mu1 >= 0.0 && mu1 <= prev_mu1) mu1_increasing = false;
    prev_mu1 = mu1;
  }
  RunResult res;
  res.summary["per_theta"] = per_theta;
  if (thetas.size() > 1) res.summary["mu1_strictly_increasing"] = mu1_increasing;

  fs::create_directories(c.out);
  std::string csv = "# theta,k,lambda_discrete,lambda_oracle,rel_error\n";
  for (const auto& l : lines) csv += l + "\n";
  write_text(fs::path(c.out) / "spectrum.csv", csv);
  return res;
}

RunResult run_resolvent(const RunConfig& c) {
  const Grid grid = Grid::uniform(c.n);
  const double phi = 2.356194490192345;  // 3*pi/4
  std::vector<Complex> lambdas;
  for (double r : log_values(c.moduli)) {
    lambdas.push_back(std::polar(r, -phi));
    lambdas.push_back(Complex(r, 0.0));
    lambdas.push_back(std::polar(r, phi));
  }
  std::vector<ComplexVec> forcings{ComplexVec::Constant(grid.node_count(), Complex(1.0, 0.0))};
  const SweepResult sweep = resolvent_sweep(grid, c.theta0, c.q, lambdas, forcings);

  fs::create_directories(c.out);
  std::string csv = "# re_lambda,im_lambda,modulus,scaled_ratio,interior_residual,b1,b2\n";
  for (const auto& row : sweep.rows) {
    csv += csv_join({format_g17(row.lambda.real()), format_g17(row.lambda.imag()),
                     format_g17(std::abs(row.lambda)), format_g17(row.ratio),
                     format_g17(row.residual), format_g17(row.b1), format_g17(row.b2)}) +
           "\n";
  }
  write_text(fs::path(c.out) / "resolvent.csv", csv);

  RunResult res;
  res.summary["points"] = sweep.rows.size();
  res.summary["sup_ratio"] = sweep.sup_ratio;
  res.summary["max_interior_residual"] = sweep.max_residual;
  res.summary["max_boundary_residual"] = sweep.max_boundary;
  return res;
}

RunResult run_simulate(const RunConfig& c) {
  const Grid grid = Grid::uniform(c.n);
  const ThetaProfile profile = profile_from(c);
  const SimulateRows rows = simulate_rows(c, grid, profile);
  fs::create_directories(c.out);
  std::string csv = std::string(kSimulateHeader) + "\n";
  for (const auto& l : rows.lines) csv += l + "\n";
  write_text(fs::path(c.out) / "simulate.csv", csv);
  RunResult res;
  res.summary = rows.summary;
  res.exit_code = rows.blew_up ? 3 : 0;
  return res;
}

RunResult run_fixedpoint(const RunConfig& c) {
  const Grid grid = Grid::uniform(c.n);
  const ThetaProfile profile = profile_from(c);
  const Nonlinearity nl = c.linear ? Nonlinearity::none() : Nonlinearity::typical();
  FixedPointSolver solver(grid, BlendProfile::quintic(), profile, nl);
  FixedPointOptions opts;
  opts.T = c.T;
  opts.dt = c.dt;
  opts.tol = c.tol;
  opts.max_iter = c.max_iter;
  opts.norms.p = c.p;
  opts.norms.q = c.q;
  opts.norms.T = c.T;
  const RealVec v0 = initial_state(c, grid, profile);
  const FixedPointReport rep = solver.solve(v0, c.sigma0, opts);

  // direct-path cross check on the same data
  ImexSimulator sim(grid, profile, nl, c.dt);
  const RunOutcome direct = sim.run(v0, c.sigma0, rep.T_final);
  double sup_diff = 0.0;
  if (!direct.blew_up) {
    const std::size_t m = std::min(direct.traj.v.size(), rep.v.v.size());
    for (std::size_t k = 0; k < m; ++k) {
      sup_diff = std::max(sup_diff, (direct.traj.v[k] - rep.v.v[k]).cwiseAbs().maxCoeff());
    }
  }

  fs::create_directories(c.out);
  std::string defects = "# iteration,defect,ratio\n";
  for (std::size_t i = 0; i < rep.defects.size(); ++i) {
    const std::string ratio = i >= 1 && i - 1 < rep.ratios.size()
                                  ? format_g17(rep.ratios[i - 1])
                                  : std::string();
    defects += csv_join({std::to_string(i + 1), format_g17(rep.defects[i]), ratio}) + "\n";
  }
  write_text(fs::path(c.out) / "fixedpoint_defects.csv", defects);

  std::string csv = std::string(kSimulateHeader) + "\n";
  for (std::size_t k = 0; k < rep.v.times.size(); ++k) {
    const RealVec& v = rep.v.v[k];
    const double sigma = rep.v.sigma[k];
    const double th = profile.theta(sigma);
    const auto [b1, b2] = boundary_residuals(grid, th, v);
    csv += csv_join({format_g17(rep.v.times[k]), format_g17(sigma), format_g17(th),
                     format_g17(lq_norm(grid, v, 2.0)), format_g17(energy_form(grid, v)),
                     format_g17(v[grid.n()]), format_g17(v[0]), format_g17(b1),
                     format_g17(b2)}) +
           "\n";
  }
  write_text(fs::path(c.out) / "fixedpoint.csv", csv);

  RunResult res;
  res.summary["converged"] = rep.converged;
  res.summary["iterations"] = rep.iterations;
  res.summary["halvings"] = rep.halvings;
  res.summary["T_final"] = rep.T_final;
  res.summary["defects"] = rep.defects;
  res.summary["ratios"] = rep.ratios;
  res.summary["sup_diff_vs_direct"] = sup_diff;
  res.exit_code = rep.converged ? 0 : 3;
  return res;
}

RunResult run_sweep(const RunConfig& c) {
  const SweepRange range = c.theta_sweep.value_or(SweepRange{0.1, 1.0, 10});
  const std::vector<double> thetas = range.values();
  const int jobs = c.jobs > 0 ? c.jobs
                              : std::max(1u, std::thread::hardware_concurrency());

  struct PointResult {
    json summary;
    std::string error;
  };
  std::vector<PointResult> results(thetas.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= thetas.size()) return;
      try {
        const Grid grid = Grid::uniform(c.n);
        if (c.what == "spectrum") {
          const FkLaplacian op(grid, thetas[i]);
          const SpectrumReport rep = discrete_spectrum(op, c.modes);
          results[i].summary["theta"] = thetas[i];
          results[i].summary["lambda1"] = rep.matched.front();
          results[i].summary["rel_error1"] = rep.rel_error.front();
        } else {
          RunConfig point = c;
          point.frozen_theta = thetas[i];
          const ThetaProfile profile = ThetaProfile::constant(thetas[i]);
          const SimulateRows rows = simulate_rows(point, grid, profile);
          results[i].summary = rows.summary;
          results[i].summary["theta"] = thetas[i];
        }
      } catch (const std::exception& err) {
        results[i].error = err.what();
      }
    }
  };

  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (const auto& r : results) {
    if (!r.error.empty()) throw NumericError("sweep point failed: " + r.error);
  }

  json points = json::array();
  for (const auto& r : results) points.push_back(r.summary);
  RunResult res;
  res.summary["what"] = c.what;
  res.summary["points"] = points;

  fs::create_directories(c.out);
  std::string csv;
  if (c.what == "spectrum") {
    csv = "# theta,lambda1,rel_error1\n";
    for (const auto& p : points) {
      csv += csv_join({format_g17(p["theta"].get<double>()),
                       format_g17(p["lambda1"].get<double>()),
                       format_g17(p["rel_error1"].get<double>())}) +
             "\n";
    }
  } else {
    csv = "# theta,v_l2_final,v_l2_max,sigma_final\n";
    for (const auto& p : points) {
      csv += csv_join({format_g17(p["theta"].get<double>()),
                       format_g17(p["v_l2_final"].get<double>()),
                       format_g17(p["v_l2_max"].get<double>()),
                       format_g17(p["sigma_final"].get<double>())}) +
             "\n";
    }
  }
  write_text(fs::path(c.out) / "sweep.csv", csv);
  return res;
}

RunResult run_verify(const RunConfig& c) {
  const std::vector<VerifyCheck> checks = run_verify_suite(c);
  json arr = json::array();
  bool all_pass = true;
  for (const auto& chk : checks) {
    json j;
    j["module"] = chk.module;
    j["name"] = chk.name;
    j["pass"] = chk.pass;
    j["measured"] = chk.measured;
    j["threshold"] = chk.threshold;
    if (!chk.note.empty()) j["note"] = chk.note;
    arr.push_back(j);
    all_pass = all_pass && chk.pass;
  }
  RunResult res;
  res.summary["checks"] = arr;
  res.summary["all_pass"] = all_pass;
  res.summary["count"] = checks.size();
  res.exit_code = all_pass ? 0 : 1;
  fs::create_directories(c.out);
  write_json(fs::path(c.out) / "verify_report.json", res.summary);
  return res;
}

}  // namespace

RunResult run_command(const RunConfig& config) {
  RunResult res;
  if (config.command == "spectrum") {
    res = run_spectrum(config);
  } else if (config.command == "resolvent") {
    res = run_resolvent(config);
  } else if (config.command == "simulate") {
    res = run_simulate(config);
  } else if (config.command == "fixedpoint") {
    res = run_fixedpoint(config);
  } else if (config.command == "sweep") {
    res = run_sweep(config);
  } else if (config.command == "verify") {
    res = run_verify(config);
  } else {
    throw ConfigError("unknown command '" + config.command + "'");
  }
  res.summary["run_id"] = config.run_id();
  res.summary["command"] = config.command;
  res.summary["config"] = config.to_json();
  namespace fs = std::filesystem;
  fs::create_directories(config.out);
  write_json(fs::path(config.out) / (config.command + "_summary.json"), res.summary);
  return res;
}

}  // namespace fklab
