// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit code is the number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "core/dynamics.hpp"
#include "core/extension.hpp"
#include "core/fk_laplacian.hpp"
#include "core/resolvent.hpp"
#include "core/spectral.hpp"

using namespace fklab;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

RealVec cosine_bump(const Grid& g, double amplitude) {
  RealVec v(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) {
    v[i] = amplitude * (1.0 + std::cos(kPi * g.node(i)));
  }
  return v;
}

// --- criterion 1: eigenvalues against the transcendental oracle -------------

void criterion_1() {
  bool pass = true;
  std::string detail;
  for (double theta : {0.25, 0.5, 0.75, 1.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g400 = Grid::uniform(400);
    const SpectrumReport coarse = discrete_spectrum(FkLaplacian(g400, theta), 3);
    const Grid g800 = Grid::uniform(800);
    const SpectrumReport fine = discrete_spectrum(FkLaplacian(g800, theta), 3);
    const double elapsed = seconds_since(t0);
    double worst_coarse = 0.0, worst_fine = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (coarse.rel_error[k] > 1e-3) pass = false;
      worst_coarse = std::max(worst_coarse, coarse.rel_error[k]);
      worst_fine = std::max(worst_fine, fine.rel_error[k]);
    }
    if (worst_coarse < 3.0 * worst_fine) pass = false;
    if (elapsed > 10.0) pass = false;
    detail += "theta=" + fmt(theta) + " err=" + fmt(worst_coarse) +
              " gain=" + fmt(worst_coarse / worst_fine) + " t=" + fmt(elapsed) + "s; ";
  }
  report(1, pass, "three slowest modes match the oracle at 1e-3 with >= 3x refinement gain",
         detail);
}

// --- criterion 2: endpoint limits -------------------------------------------

void criterion_2() {
  const Grid g = Grid::uniform(400);
  const SpectrumReport periodic = discrete_spectrum(FkLaplacian(g, 0.0), 1);
  const double lam1_periodic = periodic.eigenvalues.front();
  const SpectrumReport mixed = discrete_spectrum(FkLaplacian(g, 1.0), 1);
  const double target = -kPi * kPi / 16.0;
  const double err_mixed = std::abs(mixed.matched.front() - target);
  const bool pass = std::abs(lam1_periodic) <= 1e-8 && err_mixed <= 1e-3;
  report(2, pass, "theta = 0 keeps lambda1 = 0; theta = 1 gives -pi^2/16",
         "lam1(0)=" + fmt(lam1_periodic) + " |err(1)|=" + fmt(err_mixed));
}

// --- criterion 3: dissipativity ----------------------------------------------

void criterion_3() {
  Xoshiro256 rng(404);
  bool pass = true;
  double worst_quad = 0.0;
  const Grid g = Grid::uniform(200);
  for (double theta : {0.25, 0.5, 1.0}) {
    const FkLaplacian op(g, theta);
    for (int rep = 0; rep < 100; ++rep) {
      RealVec interior(op.interior_dim());
      for (int i = 0; i < interior.size(); ++i) interior[i] = rng.normal();
      const double quad = -interior_dot(g, RealVec(op.matrix() * interior), interior);
      worst_quad = std::min(worst_quad, quad);
    }
  }
  if (worst_quad < -1e-8) pass = false;

  const double dt = 1e-3;
  const double theta = 0.5;
  ImexSimulator sim(g, ThetaProfile::constant(theta), Nonlinearity::none(), dt);
  const RealVec v0 = smooth_compatible_sample(g, theta, rng);
  const RunOutcome run = sim.run(v0, 0.0, 0.2);
  bool monotone = !run.blew_up;
  double worst_resid = 0.0;
  auto half_energy = [&](const RealVec& v) {
    return 0.5 * g.quad_weights().dot(RealVec(v.cwiseProduct(v)));
  };
  double prev = lq_norm(g, run.traj.v.front(), 2.0);
  for (std::size_t k = 1; k < run.traj.v.size(); ++k) {
    const double cur = lq_norm(g, run.traj.v[k], 2.0);
    if (cur > prev * (1.0 + 1e-12)) monotone = false;
    prev = cur;
    const RealVec mid = 0.5 * (run.traj.v[k - 1] + run.traj.v[k]);
    const double kinetic =
        (half_energy(run.traj.v[k]) - half_energy(run.traj.v[k - 1])) / dt;
    worst_resid = std::max(worst_resid, std::abs(kinetic + energy_form(g, mid)));
  }
  const double tol = 10.0 * (g.h() * g.h() + dt * dt);
  if (!monotone || worst_resid > tol) pass = false;
  report(3, pass, "quadratic form nonnegative; linear decay monotone with energy identity",
         "min<-Av,v>=" + fmt(worst_quad) +
             " energy_resid=" + fmt(worst_resid) + " tol=" + fmt(tol));
}

// --- criterion 4: resolvent sweep -------------------------------------------

void criterion_4() {
  const Grid g = Grid::uniform(200);
  const double phi = 0.75 * kPi;
  std::vector<Complex> lambdas;
  for (int k = 0; k < 10; ++k) {
    const double r = 0.1 * std::pow(10.0, 4.0 * k / 9.0);
    lambdas.push_back(std::polar(r, -phi));
    lambdas.push_back(Complex(r, 0.0));
    lambdas.push_back(std::polar(r, phi));
  }
  const std::vector<ComplexVec> forcings{
      ComplexVec(ComplexVec::Constant(g.node_count(), Complex(1.0, 0.0)))};
  const SweepResult res = resolvent_sweep(g, 0.5, 2.0, lambdas, forcings);
  const double h2 = g.h() * g.h();
  const bool pass =
      res.sup_ratio <= 10.0 && res.max_residual <= 10.0 * h2 && res.max_boundary <= 1e-8;
  report(4, pass, "30-point sector sweep: scaled norm <= 10, residuals in tolerance",
         "sup=" + fmt(res.sup_ratio) + " resid=" + fmt(res.max_residual) +
             " bc=" + fmt(res.max_boundary));
}

// --- criterion 5: three-way semigroup cross-validation ------------------------

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g = Grid::uniform(200);
  const double theta0 = 0.5;
  const FkLaplacian op(g, theta0);
  const EigenBasis basis(op);
  Xoshiro256 rng(505);
  const RealVec u0 =
      op.to_full(RealVec(random_smooth_function(g, rng).segment(1, g.n() - 1)));

  double worst = 0.0;
  for (double t : {0.1, 1.0}) {
    const RealVec via_modes = basis.evolve(t, u0);
    const RealVec via_contour = functional_calculus(
        op, [t](Complex lam) { return std::exp(t * lam); }, Contour::for_exponential(t), u0);
    ImexSimulator sim(g, ThetaProfile::constant(theta0), Nonlinearity::none(), 1e-3);
    const RunOutcome run = sim.run(u0, 0.0, t);
    const RealVec via_cn = run.traj.v.back();
    worst = std::max({worst, lq_norm(g, RealVec(via_modes - via_contour), 2.0),
                      lq_norm(g, RealVec(via_modes - via_cn), 2.0),
                      lq_norm(g, RealVec(via_contour - via_cn), 2.0)});
  }
  const double elapsed = seconds_since(t0);
  const bool pass = worst <= 1e-3 && elapsed <= 30.0;
  report(5, pass, "contour, modal, and Crank-Nicolson semigroups agree pairwise at 1e-3",
         "worst=" + fmt(worst) + " t=" + fmt(elapsed) + "s");
}

// --- criterion 6: extension-algebra suite ------------------------------------

void criterion_6() {
  const Grid g = Grid::uniform(200);
  const double h2 = g.h() * g.h();
  const ExtensionOperator ext(g, BlendProfile::quintic());
  Xoshiro256 rng(606);
  bool pass = true;
  std::string detail;

  double worst_bc = 0.0;
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const RealVec u = random_smooth_function(g, rng);
    const RealVec v = ext.apply(alpha, u);
    worst_bc = std::max(worst_bc, std::abs((1.0 - alpha) * v[g.n()] - v[0] - u[g.n()]));
    worst_bc = std::max(
        worst_bc, std::abs(deriv_trace_right(g, v) - (1.0 - alpha) * deriv_trace_left(g, v) +
                           deriv_trace_left(g, u)));
  }
  if (worst_bc > 10.0 * h2) pass = false;
  detail += "bc=" + fmt(worst_bc) + "; ";

  double worst_comm = 0.0;
  for (double alpha : {0.25, 0.75}) {
    const RealVec u = random_smooth_function(g, rng);
    const RealVec r1 = diff1(g, RealVec(ext.apply(alpha, u))) -
                       ext.apply_flipped(alpha, RealVec(diff1(g, u))) -
                       ext.remainder(1, alpha, u);
    const RealVec r2 = diff2(g, RealVec(ext.apply(alpha, u))) -
                       ext.apply(alpha, RealVec(diff2(g, u))) - ext.remainder(2, alpha, u);
    // second-order identity at interior nodes (one-sided ends carry 11x constants)
    worst_comm = std::max({worst_comm, r1.cwiseAbs().maxCoeff(),
                           r2.segment(1, g.n() - 1).cwiseAbs().maxCoeff()});
  }
  if (worst_comm > 10.0 * h2) pass = false;
  detail += "comm=" + fmt(worst_comm) + "; ";

  const double theta0 = 0.45;
  const Homogenizer hom(ext, theta0);
  double worst_inv = 0.0;
  for (double delta : {-0.3, 0.15, 0.3}) {
    const RealVec u = random_smooth_function(g, rng);
    worst_inv = std::max(worst_inv,
                         (hom.apply(theta0 + delta, hom.apply_inverse(theta0 + delta, u)) - u)
                             .norm());
  }
  if (worst_inv > 1e-10) pass = false;
  detail += "inv=" + fmt(worst_inv) + "; ";

  double worst_diff = 0.0;
  {
    const RealVec u = random_smooth_function(g, rng);
    const double t1 = theta0 + 0.3, t2 = theta0 - 0.25;
    const RealVec lhs = hom.apply_inverse(t1, u) - hom.apply_inverse(t2, u);
    const RealVec rhs = (t1 - t2) * hom.apply_inverse(
                                        t1, RealVec(ext.apply(theta0, hom.apply_inverse(t2, u))));
    worst_diff = (lhs - rhs).cwiseAbs().maxCoeff();
  }
  if (worst_diff > 1e-9) pass = false;
  detail += "resolvent_id=" + fmt(worst_diff) + "; ";

  const double dt = 1e-3;
  double worst_fd = 0.0;
  {
    const RealVec base = random_smooth_function(g, rng);
    auto alpha = [&](double t) { return theta0 + 0.1 * t; };
    auto phi = [&](double t) { return RealVec((1.0 + 0.5 * std::sin(t)) * base); };
    auto dphi = [&](double t) { return RealVec(0.5 * std::cos(t) * base); };
    for (double t : {0.4, 1.1}) {
      const RealVec formula = hom.inverse_time_derivative(alpha(t), 0.1, phi(t), dphi(t));
      const RealVec fd = (hom.apply_inverse(alpha(t + dt), phi(t + dt)) -
                          hom.apply_inverse(alpha(t - dt), phi(t - dt))) /
                         (2.0 * dt);
      worst_fd = std::max(worst_fd, (formula - fd).cwiseAbs().maxCoeff());
    }
  }
  if (worst_fd > 5.0 * dt * dt + 1e-9) pass = false;
  detail += "commutator_fd=" + fmt(worst_fd);

  report(6, pass, "extension algebra: identities, inverses, commutator within tolerance",
         detail);
}

// --- criterion 7: nonlinear well-posedness ------------------------------------

void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g = Grid::uniform(200);
  const ThetaProfile profile = ThetaProfile::logistic();
  const Nonlinearity nl = Nonlinearity::typical();
  const RealVec v0 = cosine_bump(g, 0.1);
  const FixedPointSolver solver(g, BlendProfile::quintic(), profile, nl);
  FixedPointOptions opts;
  opts.T = 0.05;
  opts.dt = 5e-4;

  bool pass = true;
  std::string detail;
  try {
    const FixedPointReport rep = solver.solve(v0, 0.5, opts);
    if (!rep.converged) pass = false;
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
      worst_ratio = std::max(worst_ratio, rep.ratios[i]);
    }
    if (worst_ratio > 0.5) pass = false;

    ImexSimulator sim(g, profile, nl, opts.dt);
    const RunOutcome direct = sim.run(v0, 0.5, rep.T_final);
    double sup = 0.0;
    for (std::size_t k = 0; k < rep.v.v.size() && k < direct.traj.v.size(); ++k) {
      sup = std::max(sup, (rep.v.v[k] - direct.traj.v[k]).cwiseAbs().maxCoeff());
    }
    if (direct.blew_up || sup > 1e-3) pass = false;

    FixedPointOptions alt = opts;
    alt.initial = InitialIterate::ZeroField;
    const FixedPointReport rep2 = solver.solve(v0, 0.5, alt);
    double gap = 0.0;
    for (std::size_t k = 0; k < rep.w.v.size(); ++k) {
      gap = std::max(gap, (rep.w.v[k] - rep2.w.v[k]).cwiseAbs().maxCoeff());
      gap = std::max(gap, std::abs(rep.w.sigma[k] - rep2.w.sigma[k]));
    }
    if (gap > 1e-8) pass = false;

    const double elapsed = seconds_since(t0);
    if (elapsed > 60.0) pass = false;
    detail = "ratio<=" + fmt(worst_ratio) + " vs_direct=" + fmt(sup) +
             " uniq=" + fmt(gap) + " t=" + fmt(elapsed) + "s";
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  report(7, pass, "Picard contraction <= 0.5, matches direct IMEX at 1e-3, unique at 1e-8",
         detail);
}

// --- criterion 8: continuous dependence ---------------------------------------

void criterion_8() {
  const Grid g = Grid::uniform(200);
  const FixedPointSolver solver(g, BlendProfile::quintic(), ThetaProfile::logistic(),
                                Nonlinearity::typical());
  FixedPointOptions opts;
  opts.T = 0.05;
  opts.dt = 5e-4;
  const RealVec v0 = cosine_bump(g, 0.1);
  RealVec shape(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) shape[i] = std::cos(2.0 * kPi * g.node(i));

  bool pass = true;
  std::string detail;
  try {
    const double r3 = continuous_dependence_probe(solver, v0, 0.5, shape, 1e-3, opts);
    const double r4 = continuous_dependence_probe(solver, v0, 0.5, shape, 1e-4, opts);
    const double spread = std::abs(r3 - r4) / std::max(r3, r4);
    pass = spread <= 0.2;
    detail = "ratio(1e-3)=" + fmt(r3) + " ratio(1e-4)=" + fmt(r4) +
             " spread=" + fmt(spread);
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  report(8, pass, "perturbation ratios at eps = 1e-3 and 1e-4 agree within 20%", detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (g_failures == 0) {
    std::printf("acceptance: all 8 criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  }
  return g_failures;
}
