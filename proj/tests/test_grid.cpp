#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/grid.hpp"

using namespace fklab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("grid construction and symmetry") {
  const Grid g = Grid::uniform(8);
  CHECK(g.node(0) == -1.0);
  CHECK(g.node(8) == 1.0);
  for (int i = 0; i <= 8; ++i) CHECK(g.node(8 - i) == -g.node(i));
  CHECK(g.h() == doctest::Approx(0.25));
  CHECK_THROWS_AS(Grid::uniform(6), ConfigError);
  CHECK_THROWS_AS(Grid::uniform(9), ConfigError);
}

TEST_CASE("reflect fixes constants, negates odd functions, is an involution") {
  const Grid g = Grid::uniform(8);
  const RealVec c = RealVec::Constant(g.node_count(), 3.25);
  CHECK((reflect(c) - c).cwiseAbs().maxCoeff() == 0.0);

  RealVec x(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) x[i] = g.node(i);
  CHECK((reflect(x) + x).cwiseAbs().maxCoeff() == 0.0);

  Xoshiro256 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const RealVec u = random_smooth_function(g, rng);
    CHECK((reflect(RealVec(reflect(u))) - u).cwiseAbs().maxCoeff() == 0.0);
    CHECK(lq_norm(g, RealVec(reflect(u)), 2.5) ==
          doctest::Approx(lq_norm(g, u, 2.5)).epsilon(1e-13));
  }
}

TEST_CASE("lq_norm reference values") {
  const Grid g = Grid::uniform(64);
  CHECK(lq_norm(g, RealVec(RealVec::Ones(g.node_count())), 2.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(lq_norm(g, RealVec(RealVec::Zero(g.node_count())), 2.0) == 0.0);

  RealVec x(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) x[i] = g.node(i);
  CHECK(std::abs(lq_norm(g, x, 2.0) - std::sqrt(2.0 / 3.0)) <= g.h() * g.h());

  RealVec bad = x;
  bad[3] = std::nan("");
  CHECK_THROWS_AS(lq_norm(g, bad, 2.0), NumericError);
  CHECK_THROWS_AS(lq_norm(g, x, 1.0), ConfigError);
}

TEST_CASE("lq_norm converges at second order") {
  const double exact = std::sqrt(std::sinh(2.0));  // || e^x ||_2 on (-1, 1)
  auto err = [&](int n) {
    const Grid g = Grid::uniform(n);
    RealVec u(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) u[i] = std::exp(g.node(i));
    return std::abs(lq_norm(g, u, 2.0) - exact);
  };
  CHECK(err(100) / err(200) >= 3.0);
}

TEST_CASE("time norm: left endpoint rule") {
  std::vector<double> ones(101, 1.0);
  CHECK(lp_time_norm(ones, 2.0, 0.01) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(lp_time_norm({1.0}, 2.0, 0.01), ConfigError);
  std::vector<double> bad = ones;
  bad[5] = std::nan("");
  CHECK_THROWS_AS(lp_time_norm(bad, 2.0, 0.01), NumericError);
}

TEST_CASE("derivatives: exactness and truncation order") {
  const Grid g = Grid::uniform(64);
  RealVec lin(g.node_count()), quad(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) {
    lin[i] = g.node(i);
    quad[i] = g.node(i) * g.node(i);
  }
  CHECK((diff1(g, lin) - RealVec::Constant(g.node_count(), 1.0)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((diff2(g, quad) - RealVec::Constant(g.node_count(), 2.0)).cwiseAbs().maxCoeff() <= 1e-12);

  const Grid fine = Grid::uniform(200);
  RealVec u(fine.node_count());
  for (int i = 0; i < fine.node_count(); ++i) u[i] = std::sin(0.5 * kPi * fine.node(i));
  const double mu2 = 0.25 * kPi * kPi;
  const RealVec resid = diff2(fine, u) + mu2 * u;
  CHECK(resid.cwiseAbs().maxCoeff() <= 10.0 * fine.h() * fine.h());
}

TEST_CASE("trajectory norms") {
  const Grid g = Grid::uniform(32);
  const double dt = 1e-3;
  const int steps = 1000;
  NormSpec spec;
  spec.p = 2.0;
  spec.q = 2.0;
  spec.T = 1.0;

  SUBCASE("zero trajectory") {
    std::vector<RealVec> w(steps + 1, RealVec(RealVec::Zero(g.node_count())));
    std::vector<double> sigma(steps + 1, 0.0);
    const TrajectoryNorms tn = trajectory_norms(g, w, sigma, dt, spec);
    CHECK(tn.e_w0 == 0.0);
    CHECK(tn.e_w1 == 0.0);
    CHECK(tn.e_sigma0 == 0.0);
    CHECK(tn.e_sigma1 == 0.0);
  }

  SUBCASE("constant in space and time") {
    std::vector<RealVec> w(steps + 1, RealVec(RealVec::Ones(g.node_count())));
    std::vector<double> sigma(steps + 1, 1.0);
    const TrajectoryNorms tn = trajectory_norms(g, w, sigma, dt, spec);
    CHECK(tn.e_w0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(tn.e_w1 >= tn.e_w0);
  }

  SUBCASE("exponential decay in time") {
    std::vector<RealVec> w(steps + 1);
    std::vector<double> sigma(steps + 1, 0.0);
    for (int k = 0; k <= steps; ++k) {
      w[k] = std::exp(-k * dt) * RealVec::Ones(g.node_count());
    }
    const TrajectoryNorms tn = trajectory_norms(g, w, sigma, dt, spec);
    const double exact_sq = 1.0 - std::exp(-2.0);  // 2 * (1 - e^{-2}) / 2
    CHECK(std::abs(tn.e_w0 * tn.e_w0 - exact_sq) <= 2.0 * dt);
  }

  SUBCASE("too few samples") {
    std::vector<RealVec> w(1, RealVec(RealVec::Zero(g.node_count())));
    std::vector<double> sigma(1, 0.0);
    CHECK_THROWS_AS(trajectory_norms(g, w, sigma, dt, spec), ConfigError);
  }
}
