#include "core/dynamics.hpp"

#include <cmath>

namespace fklab {

ThetaProfile ThetaProfile::logistic(double theta_min, double theta_max, double steepness,
                                    double center) {
  if (!(theta_min > 0.0 && theta_min < 1.0)) throw ConfigError("theta profile: theta_min in (0,1)");
  if (!(theta_max > theta_min && theta_max <= 1.0)) {
    throw ConfigError("theta profile: need theta_min < theta_max <= 1");
  }
  if (!(steepness > 0.0)) throw ConfigError("theta profile: steepness must be > 0");
  ThetaProfile p;
  p.theta_min_ = theta_min;
  p.theta_max_ = theta_max;
  p.steepness_ = steepness;
  p.center_ = center;
  return p;
}

ThetaProfile ThetaProfile::constant(double theta) {
  // the frozen escape hatch admits the periodic endpoint theta = 0
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta profile: constant theta in [0,1]");
  ThetaProfile p;
  p.constant_ = true;
  p.theta_min_ = theta;
  p.theta_max_ = theta;
  return p;
}

double ThetaProfile::theta(double sigma) const {
  if (constant_) return theta_min_;
  const double e = std::exp(steepness_ * (sigma - center_));
  return theta_min_ + (theta_max_ - theta_min_) / (1.0 + e);
}

double ThetaProfile::dtheta(double sigma) const {
  if (constant_) return 0.0;
  const double e = std::exp(steepness_ * (sigma - center_));
  const double d = 1.0 + e;
  return -(theta_max_ - theta_min_) * steepness_ * e / (d * d);
}

Nonlinearity Nonlinearity::typical() {
  Nonlinearity n;
  n.f_v = [](double v, double dv, double /*sigma*/, double theta) {
    return -theta * dv + v * (1.0 - v);
  };
  n.f_sigma = [](double trace, double sigma, double theta) {
    return sigma * (1.0 - sigma) + theta * theta * trace;
  };
  return n;
}

Nonlinearity Nonlinearity::none() { return Nonlinearity{}; }

ImexSimulator::ImexSimulator(Grid grid, ThetaProfile profile, Nonlinearity nonlin, double dt)
    : grid_(std::move(grid)), profile_(std::move(profile)), nonlin_(std::move(nonlin)), dt_(dt) {
  if (!(dt > 0.0)) throw ConfigError("simulator: dt must be positive");
  if (dt > 0.1) throw ConfigError("simulator: dt must be <= 0.1 for the explicit reaction");
}

void ImexSimulator::ensure_operator(double theta) {
  if (cache_.op && cache_.theta == theta) return;
  cache_.theta = theta;
  cache_.op = std::make_unique<FkLaplacian>(grid_, theta);
  const int m = cache_.op->interior_dim();
  RealMat sys = RealMat::Identity(m, m) - 0.5 * dt_ * cache_.op->matrix();
  cache_.lu = Eigen::PartialPivLU<RealMat>(sys);
}

RealVec ImexSimulator::reaction(double t, const RealVec& v_full, double sigma,
                                double theta) const {
  const RealVec dv = diff1(grid_, v_full);
  RealVec out(grid_.node_count());
  for (int i = 0; i < grid_.node_count(); ++i) {
    out[i] = nonlin_.eval_fv(v_full[i], dv[i], sigma, theta) +
             nonlin_.eval_gv(t, grid_.node(i));
  }
  return out;
}

SimState ImexSimulator::prepare(const RealVec& v0_full, double sigma0) {
  if (v0_full.size() != grid_.node_count()) throw ConfigError("simulator: v0 size mismatch");
  const double th = profile_.theta(sigma0);
  FkLaplacian op(grid_, th);
  SimState s;
  s.t = 0.0;
  s.v_full = op.to_full(RealVec(v0_full.segment(1, grid_.n() - 1)));
  s.sigma = sigma0;
  s.theta = th;
  return s;
}

SimState ImexSimulator::step(const SimState& state) {
  const int n = grid_.n();
  const int m = n - 1;
  const double t = state.t;
  const double theta_now = profile_.theta(state.sigma);
  const double trace_now = state.v_full[n];

  // boundary ODE predictor to the midpoint, fixing the operator's theta
  const double k1 = nonlin_.eval_fsigma(trace_now, state.sigma, theta_now) +
                    nonlin_.eval_gsigma(t);
  const double sigma_e = state.sigma + 0.5 * dt_ * k1;
  const double k2 = nonlin_.eval_fsigma(trace_now, sigma_e, profile_.theta(sigma_e)) +
                    nonlin_.eval_gsigma(t + 0.5 * dt_);
  const double sigma_mid = state.sigma + 0.25 * dt_ * (k1 + k2);
  const double theta_mid = profile_.theta(sigma_mid);

  ensure_operator(theta_mid);
  const FkLaplacian& op = *cache_.op;

  const RealVec v_int = state.v_full.segment(1, m);
  const RealVec v_bc = op.to_full(v_int);  // boundary values at the midpoint theta
  const RealVec av = op.matrix() * v_int;
  const RealVec base = v_int + 0.5 * dt_ * av;

  // diffusion Crank-Nicolson, reaction Heun (predictor + one corrector pass)
  const RealVec r0 = reaction(t, v_bc, sigma_mid, theta_mid);
  const RealVec v_star_int = cache_.lu.solve(RealVec(base + dt_ * r0.segment(1, m)));
  const RealVec v_star = op.to_full(v_star_int);
  const RealVec r1 = reaction(t + dt_, v_star, sigma_mid, theta_mid);
  const RealVec v_new_int =
      cache_.lu.solve(RealVec(base + 0.5 * dt_ * (r0.segment(1, m) + r1.segment(1, m))));
  const RealVec v_new = op.to_full(v_new_int);

  // boundary ODE with the trace of the updated field
  const double s1 = nonlin_.eval_fsigma(v_bc[n], state.sigma, theta_now) +
                    nonlin_.eval_gsigma(t);
  const double sigma_pred = state.sigma + dt_ * s1;
  const double s2 = nonlin_.eval_fsigma(v_new[n], sigma_pred, profile_.theta(sigma_pred)) +
                    nonlin_.eval_gsigma(t + dt_);
  const double sigma_new = state.sigma + 0.5 * dt_ * (s1 + s2);

  SimState out;
  out.t = t + dt_;
  out.v_full = v_new;
  out.sigma = sigma_new;
  out.theta = profile_.theta(sigma_new);
  if (!all_finite(out.v_full) || !std::isfinite(out.sigma)) {
    throw NumericError("simulator: state became non-finite at t = " + std::to_string(out.t));
  }
  return out;
}

RunOutcome ImexSimulator::run(const RealVec& v0_full, double sigma0, double T) {
  if (!(T > 0.0)) throw ConfigError("simulator: T must be positive");
  const int steps = std::max(1, static_cast<int>(std::llround(T / dt_)));
  RunOutcome out;
  out.traj.dt = dt_;
  SimState s = prepare(v0_full, sigma0);
  out.traj.times.push_back(s.t);
  out.traj.v.push_back(s.v_full);
  out.traj.sigma.push_back(s.sigma);
  for (int k = 0; k < steps; ++k) {
    try {
      s = step(s);
    } catch (const NumericError& err) {
      out.blew_up = true;
      out.message = err.what();
      return out;
    }
    out.traj.times.push_back(s.t);
    out.traj.v.push_back(s.v_full);
    out.traj.sigma.push_back(s.sigma);
  }
  return out;
}

TildeSplit transform_to_tilde(const Homogenizer& hom, double theta, const RealVec& v_full) {
  Homogenizer::check_radius(theta - hom.theta0());
  TildeSplit out;
  out.correction = (theta - hom.theta0()) * hom.extension().apply(hom.theta0(), v_full);
  out.tilde = v_full - out.correction;
  return out;
}

ForcingTerms assemble_forcing(const Homogenizer& hom, const ThetaProfile& profile,
                              const Nonlinearity& nonlin, double t, const RealVec& w_full,
                              double sigma, double sigma_prime) {
  if (!std::isfinite(sigma_prime)) throw NumericError("forcing: sigma' is not finite");
  const Grid& grid = hom.grid();
  const double theta = profile.theta(sigma);
  const double theta0 = hom.theta0();
  Homogenizer::check_radius(theta - theta0);

  const RealVec v = hom.apply_inverse(theta, w_full);
  const RealVec dv = diff1(grid, v);

  ForcingTerms out;
  out.fw1 = -profile.dtheta(sigma) * sigma_prime * hom.extension().apply(theta0, v);

  RealVec fv(grid.node_count());
  for (int i = 0; i < grid.node_count(); ++i) {
    fv[i] = nonlin.eval_fv(v[i], dv[i], sigma, theta);
  }
  out.fw2 = hom.apply(theta, fv);

  out.fw3 = (theta - theta0) * hom.extension().remainder(2, theta0, v);

  RealVec gv(grid.node_count());
  for (int i = 0; i < grid.node_count(); ++i) gv[i] = nonlin.eval_gv(t, grid.node(i));
  out.gw = hom.apply(theta, gv);

  out.fsigma = nonlin.eval_fsigma(v[grid.n()], sigma, theta);
  return out;
}

FixedPointSolver::FixedPointSolver(Grid grid, BlendProfile psi, ThetaProfile profile,
                                   Nonlinearity nonlin)
    : grid_(std::move(grid)), psi_(std::move(psi)), profile_(std::move(profile)),
      nonlin_(std::move(nonlin)) {}

FixedPointReport FixedPointSolver::solve(const RealVec& v0_full, double sigma0,
                                         const FixedPointOptions& opts) const {
  if (v0_full.size() != grid_.node_count()) throw ConfigError("fixed point: v0 size mismatch");
  if (!(opts.dt > 0.0 && opts.T >= opts.dt)) throw ConfigError("fixed point: need 0 < dt <= T");

  const double theta0 = profile_.theta(sigma0);
  Homogenizer hom(ExtensionOperator(grid_, psi_), theta0);
  FkLaplacian op0(grid_, theta0);
  const int m = op0.interior_dim();
  RealMat sys = RealMat::Identity(m, m) - 0.5 * opts.dt * op0.matrix();
  Eigen::PartialPivLU<RealMat> lu(sys);

  // project onto the theta0 boundary conditions; w(0) = v(0) since the
  // correction vanishes at t = 0
  const RealVec w0 = op0.to_full(RealVec(v0_full.segment(1, m)));

  FixedPointReport rep;
  double T = opts.T;

  for (int attempt = 0; attempt <= opts.max_halvings; ++attempt) {
    const int steps = std::max(1, static_cast<int>(std::llround(T / opts.dt)));
    const int samples = steps + 1;

    std::vector<RealVec> w(samples, w0);
    std::vector<double> sigma(samples, sigma0);
    if (opts.initial == InitialIterate::ZeroField) {
      for (int k = 1; k < samples; ++k) w[k] = RealVec::Zero(grid_.node_count());
    }

    rep = FixedPointReport{};
    rep.halvings = attempt;
    rep.T_final = steps * opts.dt;
    bool radius_violation = false;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
      double max_dev = 0.0;
      for (int k = 0; k < samples; ++k) {
        max_dev = std::max(max_dev, std::abs(profile_.theta(sigma[k]) - theta0));
      }
      if (max_dev >= opts.radius) {
        radius_violation = true;
        break;
      }

      // forcing from the previous iterate; sigma' from the ODE right-hand side
      std::vector<RealVec> forcing(samples);
      std::vector<double> fsig(samples);
      for (int k = 0; k < samples; ++k) {
        const double t = k * opts.dt;
        const double theta_k = profile_.theta(sigma[k]);
        const RealVec v_k = hom.apply_inverse(theta_k, w[k]);
        const double fs = nonlin_.eval_fsigma(v_k[grid_.n()], sigma[k], theta_k);
        const double sp = fs + nonlin_.eval_gsigma(t);
        const ForcingTerms terms =
            assemble_forcing(hom, profile_, nonlin_, t, w[k], sigma[k], sp);
        forcing[k] = terms.fw1 + terms.fw2 + terms.fw3 + terms.gw;
        fsig[k] = fs;
      }

      // linear sweep: Crank-Nicolson in w, trapezoid in sigma
      std::vector<RealVec> wn(samples);
      std::vector<double> sn(samples);
      wn[0] = w0;
      sn[0] = sigma0;
      RealVec w_int = w0.segment(1, m);
      for (int k = 0; k < steps; ++k) {
        const RealVec rhs = w_int + 0.5 * opts.dt * (op0.matrix() * w_int) +
                            0.5 * opts.dt *
                                (forcing[k].segment(1, m) + forcing[k + 1].segment(1, m));
        w_int = lu.solve(rhs);
        wn[k + 1] = op0.to_full(w_int);
        const double t0 = k * opts.dt, t1 = (k + 1) * opts.dt;
        sn[k + 1] = sn[k] + 0.5 * opts.dt *
                                (fsig[k] + nonlin_.eval_gsigma(t0) + fsig[k + 1] +
                                 nonlin_.eval_gsigma(t1));
        if (!all_finite(wn[k + 1]) || !std::isfinite(sn[k + 1])) {
          throw NumericError("fixed point: iterate became non-finite");
        }
      }

      std::vector<RealVec> dw(samples);
      std::vector<double> ds(samples);
      for (int k = 0; k < samples; ++k) {
        dw[k] = wn[k] - w[k];
        ds[k] = sn[k] - sigma[k];
      }
      NormSpec defect_spec = opts.norms;
      defect_spec.T = rep.T_final;
      const TrajectoryNorms tn = trajectory_norms(grid_, dw, ds, opts.dt, defect_spec);
      const double defect = tn.e_w1 + tn.e_sigma1;

      if (!rep.defects.empty() && rep.defects.back() > 1e-14) {
        rep.ratios.push_back(defect / rep.defects.back());
      }
      rep.defects.push_back(defect);
      rep.iterations = iter;
      w = std::move(wn);
      sigma = std::move(sn);

      if (defect <= opts.tol) {
        rep.converged = true;
        break;
      }
    }

    if (radius_violation) {
      T *= 0.5;
      if (T < opts.dt || attempt == opts.max_halvings) {
        throw RadiusError("fixed point: series radius violated after " +
                          std::to_string(attempt + 1) + " halvings");
      }
      continue;
    }

    rep.w.dt = opts.dt;
    rep.v.dt = opts.dt;
    for (int k = 0; k < samples; ++k) {
      const double t = k * opts.dt;
      rep.w.times.push_back(t);
      rep.v.times.push_back(t);
      rep.w.v.push_back(w[k]);
      rep.w.sigma.push_back(sigma[k]);
      rep.v.v.push_back(hom.apply_inverse(profile_.theta(sigma[k]), w[k]));
      rep.v.sigma.push_back(sigma[k]);
    }
    return rep;
  }
  throw RadiusError("fixed point: series radius violated at every attempted horizon");
}

double continuous_dependence_probe(const FixedPointSolver& solver, const RealVec& v0_full,
                                   double sigma0, const RealVec& shape, double eps,
                                   const FixedPointOptions& opts) {
  if (shape.norm() == 0.0) return 0.0;
  if (!(eps >= 1e-6 && eps <= 1e-2)) throw ConfigError("dependence probe: eps in [1e-6, 1e-2]");
  const FixedPointReport base = solver.solve(v0_full, sigma0, opts);
  const FixedPointReport pert = solver.solve(RealVec(v0_full + eps * shape), sigma0, opts);
  if (!base.converged || !pert.converged) {
    throw NumericError("dependence probe: fixed-point solve did not converge");
  }
  const std::size_t samples = std::min(base.w.v.size(), pert.w.v.size());
  std::vector<RealVec> dw(samples);
  std::vector<double> ds(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    dw[k] = pert.w.v[k] - base.w.v[k];
    ds[k] = pert.w.sigma[k] - base.w.sigma[k];
  }
  NormSpec spec = opts.norms;
  spec.T = base.T_final;
  const TrajectoryNorms tn = trajectory_norms(solver.grid(), dw, ds, opts.dt, spec);
  return (tn.e_w1 + tn.e_sigma1) / eps;
}

AssumptionProbe assumption_probe(const Grid& grid, const ThetaProfile& profile,
                                 const Nonlinearity& nonlin, const Trajectory& traj,
                                 const NormSpec& spec) {
  if (traj.v.size() < 2) throw ConfigError("assumption probe: need >= 2 samples");
  std::vector<double> fv_norms(traj.v.size());
  for (std::size_t k = 0; k < traj.v.size(); ++k) {
    const double theta = profile.theta(traj.sigma[k]);
    const RealVec dv = diff1(grid, traj.v[k]);
    RealVec fv(grid.node_count());
    for (int i = 0; i < grid.node_count(); ++i) {
      fv[i] = nonlin.eval_fv(traj.v[k][i], dv[i], traj.sigma[k], theta);
    }
    fv_norms[k] = lq_norm(grid, fv, spec.q);
  }
  AssumptionProbe out;
  out.fv_norm = lp_time_norm(fv_norms, spec.p, traj.dt);
  const TrajectoryNorms tn = trajectory_norms(grid, traj.v, traj.sigma, traj.dt, spec);
  out.nu = tn.e_w1;
  out.s = tn.e_sigma1;
  out.delta_T = std::pow(spec.T, 1.0 - 1.0 / spec.p);
  return out;
}

}  // namespace fklab
