#pragma once

#include "core/blend_profile.hpp"
#include "core/grid.hpp"

namespace fklab {

struct SeriesOptions {
  double tol = 1e-14;  ///< stop when the term's L^2 norm falls below tol * max(1, ||u||)
  int max_terms = 200;
};

/// Reflection-based extension operators on nodal data:
///
///   apply(alpha, u)         = [(1-alpha) u(x) + psi(x) u(-x)] / (1 + (1-alpha)^2)
///   apply_flipped(alpha, u) = same with the reflected term negated
///
/// and the derivative-commutation remainders
///
///   remainder(1, a, u) = psi'(x) u(-x) / (1 + (1-a)^2)
///   remainder(2, a, u) = (-2 psi'(x) [du](-x) + psi''(x) u(-x)) / (1 + (1-a)^2)
///
/// so that d/dx (apply u) = apply_flipped(du) + remainder(1, u) and
/// d2/dx2 (apply u) = apply(d2u) + remainder(2, u) hold in the continuum.
class ExtensionOperator {
 public:
  ExtensionOperator(Grid grid, BlendProfile psi);

  RealVec apply(double alpha, const RealVec& u) const;
  RealVec apply_flipped(double alpha, const RealVec& u) const;
  RealVec remainder(int m, double alpha, const RealVec& u) const;

  /// Dense matrix of apply(alpha, .); used by the LU inverse route.
  RealMat matrix(double alpha, bool flipped) const;

  const Grid& grid() const { return grid_; }
  const BlendProfile& profile() const { return psi_; }

 private:
  Grid grid_;
  BlendProfile psi_;
  RealVec psi_vals_, psi_d1_, psi_d2_;
};

/// The boundary homogenization map G(theta0, theta) = I - (theta - theta0) E(theta0)
/// and its inverse. G sends a function obeying the theta-boundary conditions to
/// one obeying the frozen theta0-conditions; the inverse exists for
/// |theta - theta0| < 1/2 (Neumann series, ||E|| <= 2).
class Homogenizer {
 public:
  Homogenizer(ExtensionOperator ext, double theta0)
      : ext_(std::move(ext)), theta0_(theta0) {}

  double theta0() const { return theta0_; }
  const ExtensionOperator& extension() const { return ext_; }
  const Grid& grid() const { return ext_.grid(); }

  RealVec apply(double theta, const RealVec& u) const;
  RealVec apply_flipped(double theta, const RealVec& u) const;  // uses the flipped extension

  /// Truncated Neumann series sum_k ((theta-theta0) E)^k u.
  /// Throws RadiusError when |theta - theta0| >= 1/2.
  RealVec apply_inverse(double theta, const RealVec& u,
                        const SeriesOptions& opts = {}) const;
  RealVec apply_flipped_inverse(double theta, const RealVec& u,
                                const SeriesOptions& opts = {}) const;

  /// Independent route: dense LU solve of (I - delta E) y = u.
  RealVec apply_inverse_dense(double theta, const RealVec& u) const;

  /// d/dt [G(theta0, theta(t))^{-1} phi(t)] evaluated from the resolvent
  /// identity: G^{-1} dphi + theta' G^{-1} E(theta0) G^{-1} phi.
  RealVec inverse_time_derivative(double theta, double theta_prime,
                                  const RealVec& phi, const RealVec& dphi_dt,
                                  const SeriesOptions& opts = {}) const;

  static void check_radius(double delta);

 private:
  ExtensionOperator ext_;
  double theta0_;
};

}  // namespace fklab
