#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/extension.hpp"
#include "core/fk_laplacian.hpp"
#include "core/grid.hpp"

namespace fklab {

/// Filtration ratio as a function of the boundary concentration. Smooth,
/// strictly decreasing, valued in [theta_min, theta_max] subset of (0, 1].
class ThetaProfile {
 public:
  static ThetaProfile logistic(double theta_min = 0.05, double theta_max = 0.95,
                               double steepness = 4.0, double center = 1.0);
  static ThetaProfile constant(double theta);

  double theta(double sigma) const;
  double dtheta(double sigma) const;
  bool is_constant() const { return constant_; }

  double theta_min() const { return theta_min_; }
  double theta_max() const { return theta_max_; }
  double steepness() const { return steepness_; }
  double center() const { return center_; }

 private:
  ThetaProfile() = default;
  bool constant_ = false;
  double theta_min_ = 0.05, theta_max_ = 0.95, steepness_ = 4.0, center_ = 1.0;
};

/// Reaction terms. f_v acts pointwise on (v, dv/dx, sigma, theta); f_sigma on
/// (trace of v at +1, sigma, theta). Null functions mean zero.
struct Nonlinearity {
  std::function<double(double, double, double, double)> f_v;
  std::function<double(double, double, double)> f_sigma;
  std::function<double(double, double)> g_v;  ///< (t, x)
  std::function<double(double)> g_sigma;      ///< (t)

  /// -theta dv + v(1 - v);  sigma(1 - sigma) + theta^2 * trace.
  static Nonlinearity typical();
  /// All zero: linear diffusion with a passive sigma.
  static Nonlinearity none();

  double eval_fv(double v, double dv, double sigma, double theta) const {
    return f_v ? f_v(v, dv, sigma, theta) : 0.0;
  }
  double eval_fsigma(double trace, double sigma, double theta) const {
    return f_sigma ? f_sigma(trace, sigma, theta) : 0.0;
  }
  double eval_gv(double t, double x) const { return g_v ? g_v(t, x) : 0.0; }
  double eval_gsigma(double t) const { return g_sigma ? g_sigma(t) : 0.0; }
};

struct SimState {
  double t = 0.0;
  RealVec v_full;
  double sigma = 0.0;
  double theta = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<RealVec> v;  ///< full-grid samples
  std::vector<double> sigma;
  double dt = 0.0;
};

struct RunOutcome {
  Trajectory traj;
  bool blew_up = false;
  std::string message;
};

/// One-step IMEX integrator for the coupled bulk/boundary system:
/// Crank-Nicolson diffusion with the operator refreshed at the midpoint
/// filtration ratio, explicit Heun treatment of the reaction terms and of the
/// boundary ODE (trace taken from the updated field).
class ImexSimulator {
 public:
  ImexSimulator(Grid grid, ThetaProfile profile, Nonlinearity nonlin, double dt);

  /// Project raw nodal data onto the boundary conditions at theta(sigma0).
  SimState prepare(const RealVec& v0_full, double sigma0);

  SimState step(const SimState& state);

  /// March to T (number of steps rounded from T/dt). Blow-up is reported in
  /// the outcome with the partial trajectory preserved.
  RunOutcome run(const RealVec& v0_full, double sigma0, double T);

  const Grid& grid() const { return grid_; }
  double dt() const { return dt_; }

 private:
  void ensure_operator(double theta);
  RealVec reaction(double t, const RealVec& v_full, double sigma, double theta) const;

  Grid grid_;
  ThetaProfile profile_;
  Nonlinearity nonlin_;
  double dt_;

  struct OperatorCache {
    double theta = -1.0;
    std::unique_ptr<FkLaplacian> op;
    Eigen::PartialPivLU<RealMat> lu;  // of (I - dt/2 A)
  };
  OperatorCache cache_;
};

struct TildeSplit {
  RealVec tilde;       ///< satisfies the theta0 boundary conditions to O(h^2)
  RealVec correction;  ///< tilde + correction reconstructs v exactly
};

/// Change of variables v -> (v~, v_c): v_c = (theta - theta0) E(theta0) v,
/// v~ = v - v_c. Requires |theta - theta0| < 1/2 (so the inverse exists).
TildeSplit transform_to_tilde(const Homogenizer& hom, double theta, const RealVec& v_full);

/// Forcing terms of the transformed equation at one time sample, each exposed
/// separately:
///   fw1 = -theta'(sigma) sigma' E(theta0) G^{-1} w
///   fw2 = G f_v(G^{-1} w, sigma)
///   fw3 = (theta - theta0) R_2(theta0) G^{-1} w
///   gw  = G g_v(t, .)
///   fsigma = f_sigma(trace(G^{-1} w), sigma)
struct ForcingTerms {
  RealVec fw1, fw2, fw3, gw;
  double fsigma = 0.0;
};

ForcingTerms assemble_forcing(const Homogenizer& hom, const ThetaProfile& profile,
                              const Nonlinearity& nonlin, double t, const RealVec& w_full,
                              double sigma, double sigma_prime);

enum class InitialIterate { ConstantState, ZeroField };

struct FixedPointOptions {
  double T = 0.05;
  double dt = 5e-4;
  double tol = 1e-10;
  int max_iter = 30;
  double radius = 0.45;  ///< guard strictly inside the series radius 1/2
  int max_halvings = 5;
  NormSpec norms;
  InitialIterate initial = InitialIterate::ConstantState;
};

struct FixedPointReport {
  int iterations = 0;
  std::vector<double> defects;  ///< E_{w,1} x E_{sigma,1} distance between iterates
  std::vector<double> ratios;   ///< defect_k / defect_{k-1} while defects stay > 1e-14
  bool converged = false;
  int halvings = 0;
  double T_final = 0.0;
  Trajectory w;  ///< transformed unknown (theta0 boundary conditions)
  Trajectory v;  ///< recovered solution, v = G^{-1} w
};

/// Picard iteration on the transformed system: each sweep solves the linear
/// heat problem with the frozen theta0 operator (Crank-Nicolson) and the
/// boundary ODE (trapezoid) with forcing from the previous iterate. T is
/// halved (up to max_halvings) whenever an iterate leaves the series radius.
class FixedPointSolver {
 public:
  FixedPointSolver(Grid grid, BlendProfile psi, ThetaProfile profile, Nonlinearity nonlin);

  FixedPointReport solve(const RealVec& v0_full, double sigma0,
                         const FixedPointOptions& opts) const;

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  BlendProfile psi_;
  ThetaProfile profile_;
  Nonlinearity nonlin_;
};

/// Lipschitz probe: solves with v0 and v0 + eps * shape, returns the combined
/// E_{w,1} x E_{sigma,1} distance divided by eps (0 when the shape vanishes).
double continuous_dependence_probe(const FixedPointSolver& solver, const RealVec& v0_full,
                                   double sigma0, const RealVec& shape, double eps,
                                   const FixedPointOptions& opts);

/// Size data for the nonlinearity-growth assumption: measured L^p_t L^q_x norm
/// of f_v along a trajectory together with nu = E_{w,1}, s = E_{sigma,1} and
/// delta(T) = T^{1 - 1/p}.
struct AssumptionProbe {
  double fv_norm = 0.0;
  double nu = 0.0;
  double s = 0.0;
  double delta_T = 0.0;
  double bound(double C) const { return C * (delta_T + nu + s) * (nu + s); }
};

AssumptionProbe assumption_probe(const Grid& grid, const ThetaProfile& profile,
                                 const Nonlinearity& nonlin, const Trajectory& traj,
                                 const NormSpec& spec);

}  // namespace fklab
