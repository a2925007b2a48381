#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/dynamics.hpp"
#include "core/spectral.hpp"

using namespace fklab;

namespace {
constexpr double kPi = 3.14159265358979323846;

RealVec cosine_bump(const Grid& g, double amplitude) {
  RealVec v(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) {
    v[i] = amplitude * (1.0 + std::cos(kPi * g.node(i)));
  }
  return v;
}
}  // namespace

TEST_CASE("filtration-ratio profile") {
  const ThetaProfile p = ThetaProfile::logistic();
  double prev = p.theta(-5.0);
  for (double s = -4.5; s <= 5.0; s += 0.5) {
    const double cur = p.theta(s);
    CHECK(cur < prev);
    CHECK(cur > 0.0);
    CHECK(cur <= 0.95);
    prev = cur;
  }
  const double d = 1e-6;
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    CHECK(p.dtheta(s) ==
          doctest::Approx((p.theta(s + d) - p.theta(s - d)) / (2 * d)).epsilon(1e-6));
    CHECK(p.dtheta(s) < 0.0);
  }
  const ThetaProfile c = ThetaProfile::constant(0.5);
  CHECK(c.theta(123.0) == 0.5);
  CHECK(c.dtheta(-7.0) == 0.0);
  CHECK_THROWS_AS(ThetaProfile::logistic(0.0, 0.9), ConfigError);
  CHECK_THROWS_AS(ThetaProfile::logistic(0.5, 0.4), ConfigError);
}

TEST_CASE("typical reaction terms") {
  const Nonlinearity nl = Nonlinearity::typical();
  CHECK(nl.eval_fv(0.2, 1.5, 0.0, 0.5) == doctest::Approx(-0.5 * 1.5 + 0.2 * 0.8));
  CHECK(nl.eval_fsigma(0.3, 0.5, 0.5) == doctest::Approx(0.25 + 0.25 * 0.3));
  const Nonlinearity none = Nonlinearity::none();
  CHECK(none.eval_fv(1.0, 1.0, 1.0, 1.0) == 0.0);
  CHECK(none.eval_gsigma(0.5) == 0.0);
}

TEST_CASE("logistic equilibrium is a stationary point") {
  const Grid g = Grid::uniform(64);
  ImexSimulator sim(g, ThetaProfile::logistic(), Nonlinearity::typical(), 1e-3);
  const RunOutcome run = sim.run(RealVec(RealVec::Zero(g.node_count())), 1.0, 0.05);
  REQUIRE(!run.blew_up);
  for (std::size_t k = 0; k < run.traj.v.size(); ++k) {
    CHECK(run.traj.v[k].cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(std::abs(run.traj.sigma[k] - 1.0) <= 1e-13);
  }
}

TEST_CASE("frozen-ratio linear diffusion decays at the oracle rate") {
  const Grid g = Grid::uniform(400);
  const double theta = 0.5;
  const FkLaplacian op(g, theta);
  const EigenBasis basis(op);
  const RealVec v0 = basis.mode(0);
  ImexSimulator sim(g, ThetaProfile::constant(theta), Nonlinearity::none(), 1e-3);
  const RunOutcome run = sim.run(v0, 0.0, 0.5);
  REQUIRE(!run.blew_up);
  const double mu1 = eigen_frequency_oracle(theta, 1);
  const double expected = std::exp(-mu1 * mu1 * 0.5);
  const double measured =
      lq_norm(g, run.traj.v.back(), 2.0) / lq_norm(g, run.traj.v.front(), 2.0);
  CHECK(std::abs(measured - expected) <= 1e-3);
}

TEST_CASE("periodic endpoint conserves the scheme's mass functional") {
  const Grid g = Grid::uniform(200);
  const FkLaplacian op(g, 0.0);
  Eigen::FullPivLU<RealMat> lu(RealMat(op.matrix().transpose()));
  lu.setThreshold(1e-7);
  RealVec c = lu.kernel().col(0);
  c *= 2.0 / (g.h() * c.sum());
  Xoshiro256 rng(7);
  const RealVec raw = random_smooth_function(g, rng);
  ImexSimulator sim(g, ThetaProfile::constant(0.0), Nonlinearity::none(), 1e-3);
  const RunOutcome run = sim.run(raw, 0.0, 1.0);
  REQUIRE(!run.blew_up);
  const double m0 = g.h() * c.dot(op.to_interior(run.traj.v.front()));
  for (const RealVec& v : run.traj.v) {
    CHECK(std::abs(g.h() * c.dot(op.to_interior(v)) - m0) <= 1e-8);
  }
}

TEST_CASE("quadratic reaction blow-up is reported with the partial trajectory") {
  const Grid g = Grid::uniform(64);
  ImexSimulator sim(g, ThetaProfile::constant(0.5), Nonlinearity::typical(), 0.05);
  const RunOutcome run =
      sim.run(RealVec(RealVec::Constant(g.node_count(), -80.0)), 0.5, 5.0);
  CHECK(run.blew_up);
  CHECK(!run.message.empty());
  CHECK(run.traj.v.size() >= 1);
}

TEST_CASE("change of variables") {
  const Grid g = Grid::uniform(200);
  const double h2 = g.h() * g.h();
  const double theta0 = 0.5;
  const Homogenizer hom(ExtensionOperator(g, BlendProfile::quintic()), theta0);
  Xoshiro256 rng(13);

  SUBCASE("at the base ratio the correction vanishes") {
    const RealVec v = random_smooth_function(g, rng);
    const TildeSplit split = transform_to_tilde(hom, theta0, v);
    CHECK(split.correction.cwiseAbs().maxCoeff() == 0.0);
    CHECK((split.tilde - v).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("homogenized boundary residuals and exact reconstruction") {
    const double theta = theta0 + 0.2;
    const FkLaplacian op(g, theta);
    for (int rep = 0; rep < 5; ++rep) {
      const RealVec v =
          op.to_full(RealVec(random_smooth_function(g, rng).segment(1, g.n() - 1)));
      const TildeSplit split = transform_to_tilde(hom, theta, v);
      CHECK((split.tilde + split.correction - v).cwiseAbs().maxCoeff() <= 1e-12);
      const auto [b1, b2] = boundary_residuals(g, theta0, split.tilde);
      CHECK(std::abs(b1) <= 10.0 * h2);
      CHECK(std::abs(b2) <= 10.0 * h2);
    }
  }

  SUBCASE("radius violation throws") {
    CHECK_THROWS_AS(transform_to_tilde(hom, theta0 + 0.6, RealVec(RealVec::Zero(g.node_count()))),
                    RadiusError);
  }
}

TEST_CASE("forcing terms of the transformed equation") {
  const Grid g = Grid::uniform(128);
  const ThetaProfile profile = ThetaProfile::logistic();
  const Nonlinearity nl = Nonlinearity::typical();
  const double sigma = 0.5;
  const double theta0 = profile.theta(sigma);
  const Homogenizer hom(ExtensionOperator(g, BlendProfile::quintic()), theta0);
  Xoshiro256 rng(17);
  const RealVec w = random_smooth_function(g, rng);

  SUBCASE("sigma' = 0 kills the drift term") {
    const ForcingTerms terms = assemble_forcing(hom, profile, nl, 0.0, w, sigma, 0.0);
    CHECK(terms.fw1.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("constant ratio: remainder term drops, reaction passes through") {
    const ThetaProfile frozen = ThetaProfile::constant(0.7);
    const Homogenizer hom7(ExtensionOperator(g, BlendProfile::quintic()), 0.7);
    const ForcingTerms terms = assemble_forcing(hom7, frozen, nl, 0.0, w, sigma, 0.3);
    CHECK(terms.fw3.cwiseAbs().maxCoeff() == 0.0);
    CHECK(terms.fw1.cwiseAbs().maxCoeff() == 0.0);  // dtheta = 0
    const RealVec dw = diff1(g, w);
    for (int i : {0, 17, 64, g.n()}) {
      CHECK(terms.fw2[i] ==
            doctest::Approx(nl.eval_fv(w[i], dw[i], sigma, 0.7)).epsilon(1e-12));
    }
  }

  SUBCASE("non-finite sigma' is rejected") {
    CHECK_THROWS_AS(assemble_forcing(hom, profile, nl, 0.0, w, sigma, std::nan("")),
                    NumericError);
  }
}

TEST_CASE("transformed-equation residual along a direct trajectory") {
  // transform the simulated field and check d/dt tilde - dxx tilde = sum of
  // forcing terms at O(h^2) + O(dt^2). The first few steps carry a parabolic
  // corner transient near the endpoints (the initial data satisfies the
  // boundary conditions but not the first-order corner compatibility), so the
  // identity is measured after a burn-in of half the horizon.
  const Grid g = Grid::uniform(200);
  const double dt = 5e-4;
  const ThetaProfile profile = ThetaProfile::logistic();
  const Nonlinearity nl = Nonlinearity::typical();
  ImexSimulator sim(g, profile, nl, dt);
  const RunOutcome run = sim.run(cosine_bump(g, 0.1), 0.5, 0.04);
  REQUIRE(!run.blew_up);

  const double theta0 = profile.theta(0.5);
  const Homogenizer hom(ExtensionOperator(g, BlendProfile::quintic()), theta0);

  // boundary nodes of the stored samples come from the step's midpoint theta;
  // re-impose them at the sample's own ratio before differentiating
  auto at_sample_theta = [&](std::size_t k) {
    const FkLaplacian op(g, profile.theta(run.traj.sigma[k]));
    return op.to_full(RealVec(run.traj.v[k].segment(1, g.n() - 1)));
  };

  double worst = 0.0;
  for (std::size_t k = run.traj.v.size() / 2; k + 2 < run.traj.v.size(); k += 4) {
    const double sigma = run.traj.sigma[k];
    const double theta = profile.theta(sigma);
    const double sigma_prime =
        (run.traj.sigma[k + 1] - run.traj.sigma[k - 1]) / (2.0 * dt);
    const TildeSplit now = transform_to_tilde(hom, theta, at_sample_theta(k));
    const TildeSplit prev =
        transform_to_tilde(hom, profile.theta(run.traj.sigma[k - 1]), at_sample_theta(k - 1));
    const TildeSplit next =
        transform_to_tilde(hom, profile.theta(run.traj.sigma[k + 1]), at_sample_theta(k + 1));
    const RealVec dt_tilde = (next.tilde - prev.tilde) / (2.0 * dt);
    const ForcingTerms terms = assemble_forcing(hom, profile, nl, run.traj.times[k],
                                                now.tilde, sigma, sigma_prime);
    const RealVec rhs = terms.fw1 + terms.fw2 + terms.fw3 + terms.gw;
    const RealVec resid = dt_tilde - diff2(g, now.tilde) - rhs;
    // interior nodes only; the one-sided diff2 rows carry larger constants
    for (int i = 1; i < g.n(); ++i) worst = std::max(worst, std::abs(resid[i]));
  }
  CHECK(worst <= 50.0 * (g.h() * g.h() + dt * dt));
}

TEST_CASE("fixed point: stationary data converges immediately") {
  const Grid g = Grid::uniform(64);
  const FixedPointSolver solver(g, BlendProfile::quintic(), ThetaProfile::logistic(),
                                Nonlinearity::typical());
  FixedPointOptions opts;
  opts.T = 0.02;
  opts.dt = 1e-3;
  const FixedPointReport rep =
      solver.solve(RealVec(RealVec::Zero(g.node_count())), 1.0, opts);
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(rep.defects.front() <= 1e-12);
  for (const RealVec& w : rep.w.v) CHECK(w.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fixed point: contraction, direct-path agreement, uniqueness") {
  const Grid g = Grid::uniform(128);
  const ThetaProfile profile = ThetaProfile::logistic();
  const Nonlinearity nl = Nonlinearity::typical();
  const RealVec v0 = cosine_bump(g, 0.1);
  const FixedPointSolver solver(g, BlendProfile::quintic(), profile, nl);
  FixedPointOptions opts;
  opts.T = 0.05;
  opts.dt = 5e-4;

  const FixedPointReport rep = solver.solve(v0, 0.5, opts);
  REQUIRE(rep.converged);
  CHECK(rep.halvings == 0);
  for (std::size_t i = 1; i < rep.ratios.size(); ++i) CHECK(rep.ratios[i] <= 0.5);

  ImexSimulator sim(g, profile, nl, opts.dt);
  const RunOutcome direct = sim.run(v0, 0.5, rep.T_final);
  REQUIRE(!direct.blew_up);
  double sup = 0.0;
  for (std::size_t k = 0; k < rep.v.v.size(); ++k) {
    sup = std::max(sup, (rep.v.v[k] - direct.traj.v[k]).cwiseAbs().maxCoeff());
  }
  CHECK(sup <= 1e-3);

  FixedPointOptions alt = opts;
  alt.initial = InitialIterate::ZeroField;
  const FixedPointReport rep2 = solver.solve(v0, 0.5, alt);
  REQUIRE(rep2.converged);
  double gap = 0.0;
  for (std::size_t k = 0; k < rep.w.v.size(); ++k) {
    gap = std::max(gap, (rep.w.v[k] - rep2.w.v[k]).cwiseAbs().maxCoeff());
  }
  CHECK(gap <= 1e-8);
}

TEST_CASE("fixed point: closure, iteration cap, radius exhaustion") {
  const Grid g = Grid::uniform(64);
  const ThetaProfile profile = ThetaProfile::logistic();
  const FixedPointSolver solver(g, BlendProfile::quintic(), profile,
                                Nonlinearity::typical());
  const RealVec v0 = cosine_bump(g, 0.1);

  SUBCASE("recovered v maps back onto w through the homogenizer") {
    FixedPointOptions opts;
    opts.T = 0.02;
    opts.dt = 1e-3;
    const FixedPointReport rep = solver.solve(v0, 0.5, opts);
    REQUIRE(rep.converged);
    const Homogenizer hom(ExtensionOperator(g, BlendProfile::quintic()),
                          profile.theta(0.5));
    double worst = 0.0;
    for (std::size_t k = 0; k < rep.v.v.size(); ++k) {
      const RealVec back = hom.apply(profile.theta(rep.v.sigma[k]), rep.v.v[k]);
      worst = std::max(worst, (back - rep.w.v[k]).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-10);
  }

  SUBCASE("iteration cap leaves the report unconverged") {
    FixedPointOptions opts;
    opts.T = 0.02;
    opts.dt = 1e-3;
    opts.max_iter = 1;
    const FixedPointReport rep = solver.solve(v0, 0.5, opts);
    CHECK(!rep.converged);
    CHECK(rep.iterations == 1);
  }

  SUBCASE("an unreachable radius exhausts the halving budget") {
    FixedPointOptions opts;
    opts.T = 0.04;
    opts.dt = 1e-3;
    opts.radius = 1e-12;
    CHECK_THROWS_AS(solver.solve(v0, 0.5, opts), RadiusError);
  }
}

TEST_CASE("continuous dependence probe") {
  const Grid g = Grid::uniform(128);
  const FixedPointSolver solver(g, BlendProfile::quintic(), ThetaProfile::logistic(),
                                Nonlinearity::typical());
  FixedPointOptions opts;
  opts.T = 0.04;
  opts.dt = 5e-4;
  const RealVec v0 = cosine_bump(g, 0.1);

  CHECK(continuous_dependence_probe(solver, v0, 0.5, RealVec(RealVec::Zero(g.node_count())),
                                    1e-3, opts) == 0.0);

  RealVec shape(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) shape[i] = std::cos(2.0 * kPi * g.node(i));
  const double r3 = continuous_dependence_probe(solver, v0, 0.5, shape, 1e-3, opts);
  const double r4 = continuous_dependence_probe(solver, v0, 0.5, shape, 1e-4, opts);
  CHECK(r3 > 0.0);
  CHECK(std::abs(r3 - r4) / std::max(r3, r4) <= 0.2);
  CHECK_THROWS_AS(continuous_dependence_probe(solver, v0, 0.5, shape, 1e-7, opts),
                  ConfigError);
}

TEST_CASE("frozen profile reproduces itself bit for bit") {
  const Grid g = Grid::uniform(64);
  const RealVec v0 = cosine_bump(g, 0.1);
  ImexSimulator a(g, ThetaProfile::constant(0.5), Nonlinearity::typical(), 1e-3);
  ImexSimulator b(g, ThetaProfile::constant(0.5), Nonlinearity::typical(), 1e-3);
  const RunOutcome ra = a.run(v0, 0.5, 0.02);
  const RunOutcome rb = b.run(v0, 0.5, 0.02);
  REQUIRE(ra.traj.v.size() == rb.traj.v.size());
  for (std::size_t k = 0; k < ra.traj.v.size(); ++k) {
    CHECK((ra.traj.v[k] - rb.traj.v[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ra.traj.sigma[k] == rb.traj.sigma[k]);
  }
}

TEST_CASE("growth assumption probe carries the expected structure") {
  const Grid g = Grid::uniform(128);
  const ThetaProfile profile = ThetaProfile::logistic();
  const Nonlinearity nl = Nonlinearity::typical();
  const FixedPointSolver solver(g, BlendProfile::quintic(), profile, nl);

  // r = measured / (delta + nu + s)(nu + s); the constant is calibrated once
  // at the corners of the (amplitude, horizon) box and held fixed
  auto ratio = [&](double amp, double T) {
    FixedPointOptions opts;
    opts.T = T;
    opts.dt = 5e-4;
    const FixedPointReport rep = solver.solve(cosine_bump(g, amp), 0.5, opts);
    REQUIRE(rep.converged);
    NormSpec spec = opts.norms;
    spec.T = rep.T_final;
    const AssumptionProbe probe = assumption_probe(g, profile, nl, rep.v, spec);
    CHECK(probe.fv_norm > 0.0);
    return probe.fv_norm / ((probe.delta_T + probe.nu + probe.s) * (probe.nu + probe.s));
  };

  const double c_cal =
      1.3 * std::max({ratio(0.1, 0.05), ratio(0.2, 0.05), ratio(0.1, 0.02), ratio(0.2, 0.02)});
  CHECK(ratio(0.15, 0.035) <= c_cal);
  CHECK(ratio(0.12, 0.05) <= c_cal);
}
