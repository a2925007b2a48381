#include <cmath>
#include <cstdlib>
#include <functional>

#include <nlohmann/json.hpp>

#include "core/dynamics.hpp"
#include "core/experiments.hpp"
#include "core/fk_laplacian.hpp"
#include "core/resolvent.hpp"
#include "core/spectral.hpp"

namespace fklab {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> log_space(double a, double b, int count) {
  std::vector<double> out;
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(la + (lb - la) * i / (count - 1)));
  return out;
}

struct Suite {
  std::vector<VerifyCheck> checks;
  std::string filter;

  bool wants(const std::string& module) const { return filter.empty() || filter == module; }

  void upper(const std::string& module, const std::string& name, double measured,
             double threshold, const std::string& note = "") {
    checks.push_back({module, name, measured <= threshold, measured, threshold, note});
  }
  void lower(const std::string& module, const std::string& name, double measured,
             double threshold, const std::string& note = "") {
    checks.push_back({module, name, measured >= threshold, measured, threshold,
                      note.empty() ? "pass iff measured >= threshold" : note});
  }
  void flag(const std::string& module, const std::string& name, bool ok,
            const std::string& note = "") {
    checks.push_back({module, name, ok, ok ? 1.0 : 0.0, 1.0, note});
  }
};

BlendProfile active_profile() {
  if (const char* fault = std::getenv("FKLAB_FAULT"); fault && std::string(fault) == "psi_linear") {
    return BlendProfile::linear_ramp();
  }
  return BlendProfile::quintic();
}

RealVec compatible_sample(const FkLaplacian& op, Xoshiro256& rng) {
  const RealVec raw = random_smooth_function(op.grid(), rng);
  return op.to_full(RealVec(raw.segment(1, op.grid().n() - 1)));
}

// ---------------------------------------------------------------------------

void grid_checks(Suite& s, const RunConfig& cfg) {
  const Grid coarse = Grid::uniform(64);
  Xoshiro256 rng(cfg.seed);

  double inv = 0.0, iso = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const RealVec u = random_smooth_function(coarse, rng);
    inv = std::max(inv, (reflect(RealVec(reflect(u))) - u).cwiseAbs().maxCoeff());
    iso = std::max(iso, std::abs(lq_norm(coarse, RealVec(reflect(u)), 3.0) -
                                 lq_norm(coarse, u, 3.0)));
  }
  s.upper("grid_core", "reflect_involution", inv, 1e-12);
  s.upper("grid_core", "reflect_isometry", iso, 1e-12);

  RealVec lin(coarse.node_count()), quad(coarse.node_count());
  for (int i = 0; i < coarse.node_count(); ++i) {
    lin[i] = 0.75 * coarse.node(i) - 0.25;
    quad[i] = coarse.node(i) * coarse.node(i);
  }
  s.upper("grid_core", "diff1_exact_on_linear",
          (diff1(coarse, lin) - RealVec::Constant(coarse.node_count(), 0.75)).cwiseAbs().maxCoeff(),
          1e-12);
  s.upper("grid_core", "diff2_exact_on_quadratic",
          (diff2(coarse, quad) - RealVec::Constant(coarse.node_count(), 2.0)).cwiseAbs().maxCoeff(),
          1e-12);

  auto lq_err = [](int n) {
    const Grid g = Grid::uniform(n);
    RealVec u(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) u[i] = std::exp(g.node(i));
    return std::abs(lq_norm(g, u, 2.0) - std::sqrt(std::sinh(2.0)));
  };
  s.lower("grid_core", "lq_norm_h2_convergence", lq_err(100) / lq_err(200), 3.0,
          "error factor when halving h");
}

// ---------------------------------------------------------------------------

void extension_checks(Suite& s, const RunConfig& cfg) {
  const Grid grid = Grid::uniform(cfg.n);
  const double h2 = grid.h() * grid.h();
  const BlendProfile psi = active_profile();
  const ExtensionOperator ext(grid, psi);
  Xoshiro256 rng(cfg.seed + 1);

  // linearity of every operator in the family
  {
    const double theta0 = 0.5;
    const Homogenizer hom(ext, theta0);
    const RealVec u = random_smooth_function(grid, rng);
    const RealVec v = random_smooth_function(grid, rng);
    const double a = 1.7, b = -0.6;
    const RealVec combo = a * u + b * v;
    double worst = 0.0;
    auto lin_defect = [&](const std::function<RealVec(const RealVec&)>& op) {
      worst = std::max(worst, (op(combo) - a * op(u) - b * op(v)).cwiseAbs().maxCoeff());
    };
    lin_defect([&](const RealVec& x) { return ext.apply(0.3, x); });
    lin_defect([&](const RealVec& x) { return ext.apply_flipped(0.3, x); });
    lin_defect([&](const RealVec& x) { return ext.remainder(1, 0.3, x); });
    lin_defect([&](const RealVec& x) { return ext.remainder(2, 0.3, x); });
    lin_defect([&](const RealVec& x) { return hom.apply(0.7, x); });
    lin_defect([&](const RealVec& x) { return hom.apply_inverse(0.7, x); });
    s.upper("extension_algebra", "operator_linearity", worst, 1e-12);
  }

  // boundary identities of the extension, all alphas
  {
    double worst1 = 0.0, worst2 = 0.0;
    for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      for (int rep = 0; rep < 4; ++rep) {
        const RealVec u = random_smooth_function(grid, rng);
        const RealVec eu = ext.apply(alpha, u);
        const int n = grid.n();
        worst1 = std::max(worst1,
                          std::abs((1.0 - alpha) * eu[n] - eu[0] - u[n]));
        const double lhs = deriv_trace_right(grid, eu) -
                           (1.0 - alpha) * deriv_trace_left(grid, eu);
        worst2 = std::max(worst2, std::abs(lhs - (-deriv_trace_left(grid, u))));
      }
    }
    s.upper("extension_algebra", "boundary_identity_value", worst1, 10.0 * h2);
    s.upper("extension_algebra", "boundary_identity_derivative", worst2, 10.0 * h2);
  }

  // derivative commutation with remainders, m = 1, 2 (second order measured
  // at interior nodes; the one-sided endpoint stencils carry 11x constants)
  {
    double worst1 = 0.0, worst2 = 0.0;
    for (double alpha : {0.0, 0.3, 0.8}) {
      const RealVec u = random_smooth_function(grid, rng);
      const RealVec lhs1 = diff1(grid, RealVec(ext.apply(alpha, u)));
      const RealVec rhs1 = ext.apply_flipped(alpha, RealVec(diff1(grid, u))) +
                           ext.remainder(1, alpha, u);
      worst1 = std::max(worst1, (lhs1 - rhs1).cwiseAbs().maxCoeff());
      const RealVec lhs2 = diff2(grid, RealVec(ext.apply(alpha, u)));
      const RealVec rhs2 = ext.apply(alpha, RealVec(diff2(grid, u))) +
                           ext.remainder(2, alpha, u);
      worst2 = std::max(worst2,
                        (lhs2 - rhs2).segment(1, grid.n() - 1).cwiseAbs().maxCoeff());
    }
    s.upper("extension_algebra", "derivative_commutation_m1", worst1, 10.0 * h2);
    s.upper("extension_algebra", "derivative_commutation_m2", worst2, 10.0 * h2);
  }

  const double theta0 = 0.4;
  const Homogenizer hom(ext, theta0);

  // inverse residual and the two inverse routes
  {
    double worst_resid = 0.0, worst_routes = 0.0;
    for (double delta : {-0.3, 0.2, 0.3}) {
      const RealVec u = random_smooth_function(grid, rng);
      const RealVec inv = hom.apply_inverse(theta0 + delta, u);
      worst_resid = std::max(worst_resid,
                             (hom.apply(theta0 + delta, inv) - u).norm());
      worst_routes = std::max(worst_routes,
                              (inv - hom.apply_inverse_dense(theta0 + delta, u)).norm());
    }
    s.upper("extension_algebra", "neumann_inverse_residual", worst_resid, 1e-10);
    s.upper("extension_algebra", "neumann_vs_dense_solve", worst_routes, 1e-10);
  }

  // operator-norm surrogate for the inverse
  {
    double calibrated = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
      RealVec u = random_smooth_function(grid, rng);
      u /= lq_norm(grid, u, 2.0);
      calibrated = std::max(calibrated, lq_norm(grid, RealVec(hom.apply_inverse(theta0, u)), 2.0));
    }
    const double c_cal = 1.05 * calibrated;  // delta = 0 baseline
    double worst = 0.0;
    for (double delta : {0.1, 0.2, 0.3}) {
      for (int rep = 0; rep < 50; ++rep) {
        RealVec u = random_smooth_function(grid, rng);
        u /= lq_norm(grid, u, 2.0);
        const double nrm = lq_norm(grid, RealVec(hom.apply_inverse(theta0 + delta, u)), 2.0);
        worst = std::max(worst, nrm * (1.0 - 2.0 * delta) / c_cal);
      }
    }
    s.upper("extension_algebra", "inverse_norm_bound", worst, 1.0,
            "sup ||G^{-1}u|| (1-2d)/C over random unit u");
  }

  // spatial derivative of the inverse (flipped route)
  {
    double worst = 0.0;
    for (double delta : {0.2, -0.25}) {
      const RealVec phi = random_smooth_function(grid, rng);
      const double theta = theta0 + delta;
      const RealVec lhs = diff1(grid, RealVec(hom.apply_inverse(theta, phi)));
      const RealVec rhs =
          hom.apply_flipped_inverse(theta, RealVec(diff1(grid, phi))) +
          delta * hom.apply_flipped_inverse(
                      theta, RealVec(ext.remainder(1, theta0,
                                                   RealVec(hom.apply_inverse(theta, phi)))));
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    s.upper("extension_algebra", "inverse_derivative_formula", worst, 10.0 * h2);
  }

  // difference of inverses
  {
    const RealVec u = random_smooth_function(grid, rng);
    const double t1 = theta0 + 0.25, t2 = theta0 - 0.15;
    const RealVec lhs = hom.apply_inverse(t1, u) - hom.apply_inverse(t2, u);
    const RealVec rhs =
        (t1 - t2) * hom.apply_inverse(t1, RealVec(ext.apply(theta0, hom.apply_inverse(t2, u))));
    s.upper("extension_algebra", "inverse_difference_identity",
            (lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
  }

  // time-derivative of the inverse against a centered difference
  {
    const double dt = 1e-3;
    const RealVec base = random_smooth_function(grid, rng);
    auto alpha_at = [&](double t) { return theta0 + 0.1 * t; };
    auto phi_at = [&](double t) { return RealVec((1.0 + 0.5 * std::sin(t)) * base); };
    auto dphi_at = [&](double t) { return RealVec(0.5 * std::cos(t) * base); };
    double worst = 0.0;
    for (double t : {0.3, 1.0}) {
      const RealVec formula = hom.inverse_time_derivative(alpha_at(t), 0.1, phi_at(t), dphi_at(t));
      const RealVec fd = (hom.apply_inverse(alpha_at(t + dt), phi_at(t + dt)) -
                          hom.apply_inverse(alpha_at(t - dt), phi_at(t - dt))) /
                         (2.0 * dt);
      worst = std::max(worst, (formula - fd).cwiseAbs().maxCoeff());
    }
    s.upper("extension_algebra", "inverse_time_derivative_vs_fd", worst,
            5.0 * dt * dt + 1e-9);
  }

  // difference of the time derivatives, structural bound
  {
    auto a1 = [&](double t) { return theta0 + 0.15 * std::sin(t); };
    auto a1p = [&](double t) { return 0.15 * std::cos(t); };
    auto a2 = [&](double t) { return theta0 + 0.1 * t; };
    auto a2p = [&](double) { return 0.1; };
    const RealVec base = random_smooth_function(grid, rng);
    auto phi_at = [&](double t) { return RealVec((1.0 + 0.4 * std::cos(t)) * base); };
    auto dphi_at = [&](double t) { return RealVec(-0.4 * std::sin(t) * base); };

    auto lhs_rhs = [&](double t) {
      const RealVec d1 = hom.inverse_time_derivative(a1(t), a1p(t), phi_at(t), dphi_at(t));
      const RealVec d2 = hom.inverse_time_derivative(a2(t), a2p(t), phi_at(t), dphi_at(t));
      const double lhs = lq_norm(grid, RealVec(d1 - d2), 2.0);
      const double da = std::abs(a1(t) - a2(t));
      const double dap = std::abs(a1p(t) - a2p(t));
      const double sum_a = std::abs(a1(t)) + std::abs(a2(t));
      const double sum_ap = std::abs(a1p(t)) + std::abs(a2p(t));
      const double rhs = da * lq_norm(grid, dphi_at(t), 2.0) +
                         ((1.0 + sum_a) * dap + sum_ap * da) * lq_norm(grid, phi_at(t), 2.0);
      return std::pair<double, double>(lhs, rhs);
    };
    double c_cal = 0.0;
    for (double t : {0.2, 0.6}) {
      const auto [lhs, rhs] = lhs_rhs(t);
      c_cal = std::max(c_cal, lhs / rhs);
    }
    c_cal *= 1.3;
    double worst = 0.0;
    for (double t : {0.4, 0.9, 1.3}) {
      const auto [lhs, rhs] = lhs_rhs(t);
      worst = std::max(worst, lhs / (c_cal * rhs));
    }
    s.upper("extension_algebra", "inverse_time_derivative_difference_bound", worst, 1.0,
            "lhs / (C rhs), C calibrated at held-out times");
  }
}

// ---------------------------------------------------------------------------

void fk_operator_checks(Suite& s, const RunConfig& cfg) {
  const Grid grid = Grid::uniform(cfg.n);
  Xoshiro256 rng(cfg.seed + 2);

  {
    const FkLaplacian op(grid, 0.0);
    const RealVec ones = RealVec::Ones(op.interior_dim());
    s.upper("fk_operator", "theta0_constant_kernel",
            (op.matrix() * ones).cwiseAbs().maxCoeff(), 1e-10);
  }

  {
    double worst = 0.0;
    for (double th : {0.0, 0.3, 0.7, 1.0}) {
      const FkLaplacian op(grid, th);
      for (int rep = 0; rep < 5; ++rep) {
        RealVec interior(op.interior_dim());
        for (int i = 0; i < interior.size(); ++i) interior[i] = rng.uniform(-1.0, 1.0);
        const RealVec full = op.to_full(interior);
        const auto [b1, b2] = boundary_residuals(grid, th, full);
        worst = std::max({worst, std::abs(b1), std::abs(b2)});
      }
    }
    s.upper("fk_operator", "elimination_reconstructs_bcs", worst, 1e-12);
  }

  {
    double worst = 0.0;
    for (double th : {0.25, 0.5, 1.0}) {
      const FkLaplacian op(grid, th);
      for (int rep = 0; rep < 100; ++rep) {
        RealVec interior(op.interior_dim());
        for (int i = 0; i < interior.size(); ++i) interior[i] = rng.normal();
        const double quad = -interior_dot(grid, RealVec(op.matrix() * interior), interior);
        worst = std::min(worst, quad);
      }
    }
    s.upper("fk_operator", "energy_nonnegative", -worst, 1e-8,
            "max of <Av,v> over random compatible v");
  }

  {
    double worst = 0.0;
    for (double th : {0.4, 1.0}) {
      for (int rep = 0; rep < 5; ++rep) {
        const RealVec v = smooth_compatible_sample(grid, th, rng);
        const double e_quad = energy_form(grid, v);
        const double pairing =
            -grid.quad_weights().dot(RealVec(diff2(grid, v).cwiseProduct(v)));
        worst = std::max(worst, std::abs(e_quad - pairing) / (1.0 + std::abs(pairing)));
      }
    }
    s.upper("fk_operator", "energy_matches_quadrature", worst,
            20.0 * grid.h() * grid.h());
  }

  {
    auto form_defect = [&](int n) {
      const Grid g = Grid::uniform(n);
      const FkLaplacian op(g, 0.6);
      Xoshiro256 local(cfg.seed + 3);
      double worst = 0.0;
      for (int rep = 0; rep < 5; ++rep) {
        const RealVec u = smooth_compatible_sample(g, 0.6, local);
        const RealVec v = smooth_compatible_sample(g, 0.6, local);
        const double uv = interior_dot(g, RealVec(op.matrix() * op.to_interior(u)), op.to_interior(v));
        const double vu = interior_dot(g, RealVec(op.matrix() * op.to_interior(v)), op.to_interior(u));
        worst = std::max(worst, std::abs(uv - vu));
      }
      return worst;
    };
    s.lower("fk_operator", "weak_symmetry_defect_halves", form_defect(cfg.n) / form_defect(2 * cfg.n),
            1.8, "form defect ratio under h -> h/2");
  }

  {
    bool ok = true;
    std::string note;
    for (double th : {0.1, 0.4, 0.8, 1.0}) {
      const FkLaplacian op(grid, th);
      const SpectrumReport rep = discrete_spectrum(op, 1);
      const double gap = th * th / (kPoincareGapConstant * kPoincareGapConstant *
                                    (1.0 + th) * (1.0 + th));
      if (rep.max_imag > 1e-8 || rep.eigenvalues.front() > -gap) {
        ok = false;
        note = "theta=" + format_g17(th);
      }
    }
    s.flag("fk_operator", "spectrum_real_negative_with_gap", ok, note);
  }

  {
    // endpoint limits of the spectrum, using the sorted eigenvalues so the
    // periodic doubles are checked individually
    const FkLaplacian op0(grid, 0.0);
    const SpectrumReport rep0 = discrete_spectrum(op0, 5);
    double worst0 = std::abs(rep0.eigenvalues.front());  // lambda_1 = 0
    worst0 = std::max(worst0, std::abs(rep0.eigenvalues[1] + kPi * kPi) / (kPi * kPi));
    worst0 = std::max(worst0, std::abs(rep0.eigenvalues[2] + kPi * kPi) / (kPi * kPi));
    worst0 = std::max(worst0, std::abs(rep0.eigenvalues[3] + 4 * kPi * kPi) / (4 * kPi * kPi));
    worst0 = std::max(worst0, std::abs(rep0.eigenvalues[4] + 4 * kPi * kPi) / (4 * kPi * kPi));
    s.upper("fk_operator", "theta0_periodic_limit", worst0, 1e-2);

    const FkLaplacian op1(grid, 1.0);
    const SpectrumReport rep1 = discrete_spectrum(op1, 3);
    double worst1 = 0.0;
    for (int k = 0; k < 3; ++k) worst1 = std::max(worst1, rep1.rel_error[k]);
    s.upper("fk_operator", "theta1_mixed_limit", worst1, 1e-2);
  }
}

// ---------------------------------------------------------------------------

void spectral_checks(Suite& s, const RunConfig& cfg) {
  Xoshiro256 rng(cfg.seed + 4);

  {
    double worst = 0.0;
    for (double th : {0.25, 0.5, 0.75, 1.0}) {
      for (int k = 1; k <= 5; ++k) {
        const double mu = eigen_frequency_oracle(th, k);
        worst = std::max(worst, std::abs(boundary_determinant(th, Complex(-mu * mu, 0.0))));
      }
    }
    s.upper("spectral_analysis", "oracle_roots_kill_determinant", worst, 1e-10);
  }

  {
    // sign changes of the reduced determinant on (0, 5 pi) match the oracle count
    const double th = 0.6;
    int crossings = 0;
    const int samples = 20000;
    double prev = boundary_determinant_reduced(th, 1e-9);
    for (int i = 1; i <= samples; ++i) {
      const double mu = 5.0 * kPi * i / samples;
      const double cur = boundary_determinant_reduced(th, mu);
      if ((cur > 0) != (prev > 0)) ++crossings;
      prev = cur;
    }
    int oracle_count = 0;
    for (int k = 1; k <= 12; ++k) {
      if (eigen_frequency_oracle(th, k) < 5.0 * kPi) ++oracle_count;
    }
    s.flag("spectral_analysis", "sign_changes_match_oracle_roots", crossings == oracle_count,
           "crossings=" + std::to_string(crossings) + " oracle=" + std::to_string(oracle_count));
  }

  {
    // reduced real form against the complex determinant at random frequencies
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const double mu = rng.uniform(0.05, 12.0);
      const double th = rng.uniform(0.05, 1.0);
      const Complex direct = boundary_determinant(th, Complex(-mu * mu, 0.0));
      const double reduced = 2.0 * boundary_determinant_reduced(th, mu);
      worst = std::max(worst, std::abs(direct - Complex(reduced, 0.0)));
    }
    s.upper("spectral_analysis", "complex_vs_reduced_determinant", worst, 1e-10);
  }

  {
    auto first_error = [&](int n) {
      const Grid g = Grid::uniform(n);
      const FkLaplacian op(g, 0.5);
      return discrete_spectrum(op, 3);
    };
    const SpectrumReport rep200 = first_error(200);
    const SpectrumReport rep400 = first_error(400);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) worst = std::max(worst, rep400.rel_error[k]);
    s.upper("spectral_analysis", "discrete_matches_oracle_n400", worst, 1e-3);
    s.lower("spectral_analysis", "refinement_reduces_error",
            rep200.rel_error.front() / rep400.rel_error.front(), 3.0);
  }

  {
    bool increasing = true, decreasing = true;
    double prev_mu = -1.0, prev_lambda = 1.0;
    const Grid g = Grid::uniform(400);
    for (int i = 1; i <= 10; ++i) {
      const double th = 0.1 * i;
      const double mu = eigen_frequency_oracle(th, 1);
      const FkLaplacian op(g, th);
      const SpectrumReport rep = discrete_spectrum(op, 1);
      if (mu <= prev_mu) increasing = false;
      if (rep.eigenvalues.front() >= prev_lambda) decreasing = false;
      prev_mu = mu;
      prev_lambda = rep.eigenvalues.front();
    }
    s.flag("spectral_analysis", "mu1_increasing_lambda1_decreasing", increasing && decreasing);
  }

  {
    const Grid g = Grid::uniform(cfg.n);
    Xoshiro256 cal_rng(cfg.seed + 5);
    const double constant = calibrate_poincare_constant(g, cal_rng, 500);
    double worst = 0.0;
    for (double th : {0.05, 0.3, 1.0}) {
      const PoincareResult res = poincare_check(g, th, 200, rng, constant);
      worst = std::max(worst, res.measured_ratio / res.bound);
    }
    s.upper("spectral_analysis", "poincare_trace_inequality", worst, 1.0,
            "measured ratio over bound, C calibrated at theta = 1");
  }

  {
    const Grid g = Grid::uniform(cfg.n);
    const FkLaplacian op(g, 0.5);
    const EigenBasis basis(op);
    const RealVec u0 = compatible_sample(op, rng);
    const RealVec both = basis.evolve(0.7, u0);
    const RealVec split = basis.evolve(0.3, basis.evolve(0.4, u0));
    s.upper("spectral_analysis", "semigroup_property", (both - split).cwiseAbs().maxCoeff(),
            1e-8);
    double lam1 = -1e30;
    for (Eigen::Index k = 0; k < basis.eigenvalues().size(); ++k) {
      lam1 = std::max(lam1, basis.eigenvalues()[k].real());
    }
    double decay = 0.0;
    for (double t : {0.1, 1.0}) {
      decay = std::max(decay, lq_norm(g, basis.evolve(t, u0), 2.0) /
                                  (std::exp(lam1 * t) * lq_norm(g, u0, 2.0)));
    }
    s.upper("spectral_analysis", "semigroup_spectral_decay", decay, 1.0 + 1e-6);
  }
}

// ---------------------------------------------------------------------------

void resolvent_checks(Suite& s, const RunConfig& cfg) {
  const Grid grid = Grid::uniform(cfg.n);
  const double h2 = grid.h() * grid.h();
  const double theta0 = 0.5;
  const FkLaplacian op(grid, theta0);
  Xoshiro256 rng(cfg.seed + 6);

  {
    // resolvent identity on the assembled operator
    const Complex lam(2.0, 1.0), nu(5.0, -3.0);
    const ComplexVec f = random_smooth_function(grid, rng).cast<Complex>();
    const ComplexVec lhs = resolvent_apply_dense(op, lam, f) - resolvent_apply_dense(op, nu, f);
    const ComplexVec rhs = (nu - lam) * resolvent_apply_dense(op, lam,
                                                              resolvent_apply_dense(op, nu, f));
    s.upper("resolvent_calculus", "resolvent_identity",
            (lhs - rhs).cwiseAbs().maxCoeff(), 1e-8);
  }

  {
    // kernel route against the dense route
    double worst = 0.0;
    for (const Complex lam : {Complex(2.0, 2.0), Complex(0.5, -1.0), Complex(40.0, 0.0)}) {
      const ComplexVec f = ComplexVec::Constant(grid.node_count(), Complex(1.0, 0.0));
      const KernelSolution sol = resolvent_apply_kernel(grid, theta0, lam, f);
      const ComplexVec dense = resolvent_apply_dense(op, lam, f);
      worst = std::max(worst, (sol.u - dense).cwiseAbs().maxCoeff());
    }
    s.upper("resolvent_calculus", "kernel_vs_dense_route", worst, 50.0 * h2);
  }

  {
    // left inverse on smooth compatible data
    const RealVec u = smooth_compatible_sample(grid, theta0, rng);
    const Complex lam(3.0, 1.5);
    const ComplexVec f = lam * u.cast<Complex>() - diff2(grid, u.cast<Complex>().eval());
    const KernelSolution sol = resolvent_apply_kernel(grid, theta0, lam, f);
    s.upper("resolvent_calculus", "left_inverse_on_compatible_data",
            (sol.u - u.cast<Complex>()).cwiseAbs().maxCoeff(), 100.0 * h2);
  }

  {
    const double phi = 0.75 * kPi;
    std::vector<Complex> lambdas;
    for (double r : log_space(0.1, 1000.0, 10)) {
      lambdas.push_back(std::polar(r, -phi));
      lambdas.push_back(Complex(r, 0.0));
      lambdas.push_back(std::polar(r, phi));
    }
    std::vector<ComplexVec> forcings{ComplexVec::Constant(grid.node_count(), Complex(1.0, 0.0))};
    const SweepResult sweep = resolvent_sweep(grid, theta0, 2.0, lambdas, forcings);
    s.upper("resolvent_calculus", "sector_sweep_scaled_norm", sweep.sup_ratio, 10.0);
    s.upper("resolvent_calculus", "sector_sweep_interior_residual", sweep.max_residual,
            10.0 * h2);
    s.upper("resolvent_calculus", "sector_sweep_boundary_residual", sweep.max_boundary, 1e-8);
  }

  {
    const EigenBasis basis(op);
    const RealVec u0 = compatible_sample(op, rng);
    double worst = 0.0;
    for (double t : {0.1, 1.0}) {
      const Contour contour = Contour::for_exponential(t);
      const RealVec via_contour = functional_calculus(
          op, [t](Complex lam) { return std::exp(t * lam); }, contour, u0);
      worst = std::max(worst, lq_norm(grid, RealVec(via_contour - basis.evolve(t, u0)), 2.0));
    }
    s.upper("resolvent_calculus", "contour_vs_modal_semigroup", worst, 1e-3);

    const Contour contour = Contour::for_exponential(1.0);
    const RealVec e1 = functional_calculus(
        op, [](Complex lam) { return std::exp(lam); }, contour, u0);
    s.upper("resolvent_calculus", "contour_semigroup_contractive",
            lq_norm(grid, e1, 2.0) / lq_norm(grid, u0, 2.0), 1.0 + 1e-4);
  }

  {
    // Cauchy formula probe: h(z) = 1/(z - mu) gives -(mu - A)^{-1}
    const double mu = 2.0;
    Contour contour;
    contour.r_outer = 3e7;
    const RealVec u0 = compatible_sample(op, rng);
    const RealVec probe = functional_calculus(
        op, [mu](Complex lam) { return 1.0 / (lam - mu); }, contour, u0);
    const ComplexVec res = resolvent_apply_dense(op, Complex(mu, 0.0), u0.cast<Complex>());
    s.upper("resolvent_calculus", "cauchy_resolvent_probe",
            (probe.cast<Complex>() + res).cwiseAbs().maxCoeff(), 1e-6);
  }

  {
    // imaginary-power probes mollified into the decaying class
    const RealVec u0 = compatible_sample(op, rng);
    const double nu0 = lq_norm(grid, u0, 2.0);
    Contour contour;
    contour.r_outer = 3e7;
    auto probe_gain = [&](double tau) {
      auto h = [tau](Complex lam) {
        return std::exp(Complex(0.0, tau) * std::log(lam)) * lam / ((1.0 + lam) * (1.0 + lam));
      };
      double sup_h = 0.0;
      for (const auto& [lam, w] : contour.nodes()) {
        (void)w;
        sup_h = std::max(sup_h, std::abs(h(lam)));
      }
      return lq_norm(grid, functional_calculus(op, h, contour, u0), 2.0) / (sup_h * nu0);
    };
    // the gain grows with |tau| (bounded imaginary powers carry an angle
    // factor), so the family constant is calibrated at the range endpoints
    // and asserted at interior exponents
    const double c_cal = 1.3 * std::max(probe_gain(0.5), probe_gain(2.0));
    double worst = 0.0;
    for (double tau : {1.0, 1.5}) worst = std::max(worst, probe_gain(tau) / c_cal);
    s.upper("resolvent_calculus", "imaginary_power_probe_bound", worst, 1.0,
            "||h(A)u|| / (C sup|h| ||u||), C calibrated at tau in {0.5, 2}");
  }
}

// ---------------------------------------------------------------------------

void dynamics_checks(Suite& s, const RunConfig& cfg) {
  const Grid grid = Grid::uniform(cfg.n);
  const double h2 = grid.h() * grid.h();
  Xoshiro256 rng(cfg.seed + 7);

  {
    // frozen-theta linear decay: monotone norm and the per-step energy identity
    const double dt = 1e-3;
    const double theta = 0.5;
    ImexSimulator sim(grid, ThetaProfile::constant(theta), Nonlinearity::none(), dt);
    const RunOutcome run = sim.run(smooth_compatible_sample(grid, theta, rng), 0.0, 0.2);
    bool monotone = true;
    double worst_resid = 0.0;
    auto half_energy = [&](const RealVec& v) {
      return 0.5 * grid.quad_weights().dot(RealVec(v.cwiseProduct(v)));
    };
    double prev = lq_norm(grid, run.traj.v.front(), 2.0);
    for (std::size_t k = 1; k < run.traj.v.size(); ++k) {
      const double cur = lq_norm(grid, run.traj.v[k], 2.0);
      if (cur > prev * (1.0 + 1e-12)) monotone = false;
      prev = cur;
      const RealVec mid = 0.5 * (run.traj.v[k - 1] + run.traj.v[k]);
      const double kinetic =
          (half_energy(run.traj.v[k]) - half_energy(run.traj.v[k - 1])) / dt;
      worst_resid = std::max(worst_resid, std::abs(kinetic + energy_form(grid, mid)));
    }
    s.flag("dynamics", "linear_decay_monotone", monotone);
    s.upper("dynamics", "energy_identity_residual", worst_resid, 10.0 * (h2 + dt * dt));
  }

  {
    // periodic endpoint: the scheme's conserved functional stays put
    const double dt = 1e-3;
    ImexSimulator sim(grid, ThetaProfile::constant(0.0), Nonlinearity::none(), dt);
    const FkLaplacian op(grid, 0.0);
    Eigen::FullPivLU<RealMat> lu(op.matrix().transpose());
    lu.setThreshold(1e-7);
    const RealMat kernel = lu.kernel();
    RealVec c = kernel.col(0);
    c *= 2.0 / (grid.h() * c.sum());  // normalize to approximate the mean over (-1,1)
    const RunOutcome run = sim.run(compatible_sample(op, rng), 0.0, 1.0);
    const double m0 = grid.h() * c.dot(op.to_interior(run.traj.v.front()));
    double drift = 0.0;
    for (const RealVec& v : run.traj.v) {
      drift = std::max(drift, std::abs(grid.h() * c.dot(op.to_interior(v)) - m0));
    }
    s.upper("dynamics", "periodic_mass_conservation", drift, 1e-8);
  }

  {
    // logistic equilibrium is stationary
    ImexSimulator sim(grid, ThetaProfile::logistic(), Nonlinearity::typical(), 1e-3);
    const RunOutcome run = sim.run(RealVec::Zero(grid.node_count()), 1.0, 0.1);
    double worst = 0.0;
    for (std::size_t k = 0; k < run.traj.v.size(); ++k) {
      worst = std::max(worst, run.traj.v[k].cwiseAbs().maxCoeff());
      worst = std::max(worst, std::abs(run.traj.sigma[k] - 1.0));
    }
    s.upper("dynamics", "logistic_equilibrium_stationary", worst, 1e-12);
  }

  {
    // change of variables: reconstruction and homogenized boundary residuals
    const double theta0 = 0.55, theta = 0.75;
    const Homogenizer hom(ExtensionOperator(grid, active_profile()), theta0);
    const FkLaplacian op_theta(grid, theta);
    double recon = 0.0, resid = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
      const RealVec v = compatible_sample(op_theta, rng);
      const TildeSplit split = transform_to_tilde(hom, theta, v);
      recon = std::max(recon, (split.tilde + split.correction - v).cwiseAbs().maxCoeff());
      const auto [b1, b2] = boundary_residuals(grid, theta0, split.tilde);
      resid = std::max({resid, std::abs(b1), std::abs(b2)});
    }
    s.upper("dynamics", "tilde_reconstruction_exact", recon, 1e-12);
    s.upper("dynamics", "tilde_homogenized_boundary", resid, 10.0 * h2);
  }

  // nonlinear fixed-point block at the well-posedness configuration
  const ThetaProfile profile = ThetaProfile::logistic();
  const Nonlinearity nl = Nonlinearity::typical();
  RealVec v0(grid.node_count());
  for (int i = 0; i < grid.node_count(); ++i) {
    v0[i] = 0.1 * (1.0 + std::cos(kPi * grid.node(i)));
  }
  FixedPointOptions opts;
  opts.T = 0.05;
  opts.dt = 5e-4;
  const FixedPointSolver solver(grid, BlendProfile::quintic(), profile, nl);

  {
    const FixedPointReport rep = solver.solve(v0, 0.5, opts);
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
      worst_ratio = std::max(worst_ratio, rep.ratios[i]);
    }
    s.flag("dynamics", "picard_converged", rep.converged,
           "iterations=" + std::to_string(rep.iterations));
    s.upper("dynamics", "picard_contraction_ratios", worst_ratio, 0.5);

    ImexSimulator sim(grid, profile, nl, opts.dt);
    const RunOutcome direct = sim.run(v0, 0.5, rep.T_final);
    double sup_diff = 0.0;
    for (std::size_t k = 0; k < rep.v.v.size(); ++k) {
      sup_diff = std::max(sup_diff, (rep.v.v[k] - direct.traj.v[k]).cwiseAbs().maxCoeff());
    }
    s.upper("dynamics", "fixed_point_matches_direct", sup_diff, 1e-3);

    FixedPointOptions alt = opts;
    alt.initial = InitialIterate::ZeroField;
    const FixedPointReport rep2 = solver.solve(v0, 0.5, alt);
    double gap = 0.0;
    for (std::size_t k = 0; k < rep.w.v.size(); ++k) {
      gap = std::max(gap, (rep.w.v[k] - rep2.w.v[k]).cwiseAbs().maxCoeff());
      gap = std::max(gap, std::abs(rep.w.sigma[k] - rep2.w.sigma[k]));
    }
    s.upper("dynamics", "fixed_point_unique", gap, 1e-8);

    // growth assumption on the nonlinearity: one constant calibrated at the
    // corners of the (amplitude, horizon) box, asserted at held-out configs
    auto growth_ratio = [&](double amp, double T) {
      FixedPointOptions local = opts;
      local.T = T;
      const FixedPointReport r = solver.solve(RealVec((amp / 0.1) * v0), 0.5, local);
      NormSpec spec = opts.norms;
      spec.T = r.T_final;
      const AssumptionProbe probe = assumption_probe(grid, profile, nl, r.v, spec);
      return probe.fv_norm / ((probe.delta_T + probe.nu + probe.s) * (probe.nu + probe.s));
    };
    const double c_cal = 1.3 * std::max({growth_ratio(0.1, 0.05), growth_ratio(0.2, 0.05),
                                         growth_ratio(0.1, 0.02), growth_ratio(0.2, 0.02)});
    s.upper("dynamics", "nonlinearity_growth_assumption",
            std::max(growth_ratio(0.15, 0.035), growth_ratio(0.12, 0.05)) / c_cal, 1.0,
            "measured/(delta+nu+s)(nu+s) over the calibrated constant");
  }

  {
    RealVec shape(grid.node_count());
    for (int i = 0; i < grid.node_count(); ++i) shape[i] = std::cos(2.0 * kPi * grid.node(i));
    const double r3 = continuous_dependence_probe(solver, v0, 0.5, shape, 1e-3, opts);
    const double r4 = continuous_dependence_probe(solver, v0, 0.5, shape, 1e-4, opts);
    s.upper("dynamics", "lipschitz_dependence_stable",
            std::abs(r3 - r4) / std::max(r3, r4), 0.2);
  }

  {
    // a constant profile and the frozen-theta escape hatch share the code path
    ImexSimulator a(grid, ThetaProfile::constant(0.5), nl, 1e-3);
    ImexSimulator b(grid, ThetaProfile::constant(0.5), nl, 1e-3);
    const RunOutcome ra = a.run(v0, 0.5, 0.02);
    const RunOutcome rb = b.run(v0, 0.5, 0.02);
    double gap = 0.0;
    for (std::size_t k = 0; k < ra.traj.v.size(); ++k) {
      gap = std::max(gap, (ra.traj.v[k] - rb.traj.v[k]).cwiseAbs().maxCoeff());
    }
    s.upper("dynamics", "frozen_theta_bitwise_reproducible", gap, 0.0);
  }
}

}  // namespace

std::vector<VerifyCheck> run_verify_suite(const RunConfig& config) {
  Suite suite;
  suite.filter = config.only;
  if (suite.wants("grid_core")) grid_checks(suite, config);
  if (suite.wants("extension_algebra")) extension_checks(suite, config);
  if (suite.wants("fk_operator")) fk_operator_checks(suite, config);
  if (suite.wants("spectral_analysis")) spectral_checks(suite, config);
  if (suite.wants("resolvent_calculus")) resolvent_checks(suite, config);
  if (suite.wants("dynamics")) dynamics_checks(suite, config);
  if (suite.checks.empty()) {
    throw ConfigError("verify: unknown module filter '" + config.only + "'");
  }
  return suite.checks;
}

}  // namespace fklab
