#pragma once

#include <vector>

#include "core/fk_laplacian.hpp"
#include "core/grid.hpp"
#include "core/rng.hpp"

namespace fklab {

/// k-th positive frequency of the continuous operator: the k-th root of
/// tan^2(mu) = theta^2 / (2 - theta)^2, located by bisection of
/// g(mu) = theta^2 cos^2(mu) - (2-theta)^2 sin^2(mu) on half-period brackets.
/// The eigenvalues are -mu_k^2. theta = 0 returns the periodic ladder
/// 0, pi, pi, 2pi, 2pi, ...
double eigen_frequency_oracle(double theta, int k);

/// g(mu) above; 2*g is the boundary determinant evaluated at lambda = -mu^2.
double boundary_determinant_reduced(double theta, double mu);

/// The boundary determinant M(lambda) from the exponential-solution ansatz,
/// evaluated with the principal square root.
Complex boundary_determinant(double theta0, Complex lambda);

struct SpectrumReport {
  double theta = 0.0;
  int n = 0;
  std::vector<double> eigenvalues;     ///< real parts, sorted descending
  double max_imag = 0.0;               ///< largest |Im| over the whole spectrum
  std::vector<double> oracle;          ///< -mu_k^2 for k = 1..K
  std::vector<double> matched;         ///< discrete eigenvalue nearest each oracle
  std::vector<double> rel_error;       ///< |matched - oracle| / max(|oracle|, eps)
};

/// Dense eigen-decomposition of the reduced operator, matched mode-by-mode
/// against the transcendental oracle.
SpectrumReport discrete_spectrum(const FkLaplacian& op, int modes);

/// Eigen-decomposition kept for modal propagation e^{tA} u0.
class EigenBasis {
 public:
  explicit EigenBasis(const FkLaplacian& op);

  /// Modal evolution of a full nodal state; t >= 0. Throws NumericError when
  /// the eigenbasis is too ill-conditioned to trust (use the resolvent path).
  RealVec evolve(double t, const RealVec& u0_full) const;

  double condition() const { return condition_; }
  const ComplexVec& eigenvalues() const { return values_; }
  RealVec mode(int k) const;  ///< full-grid eigenvector for the k-th slowest mode

 private:
  const FkLaplacian* op_;
  ComplexMat vectors_;
  ComplexVec values_;
  Eigen::PartialPivLU<ComplexMat> lu_;
  double condition_ = 0.0;
  std::vector<int> order_;  // indices sorted by descending real part
};

/// Nodal samples of the k-th continuum eigenfunction
/// (2-theta) sin(mu_k) cos(mu_k x) + theta cos(mu_k) sin(mu_k x), which
/// satisfies both boundary conditions exactly. theta = 0 falls back to the
/// periodic ladder {1, cos(pi x), sin(pi x), ...}.
RealVec eigenfunction_nodal(const Grid& grid, double theta, int k);

/// Random low-mode combination of exact eigenfunctions: smooth data that is
/// boundary-compatible in the continuum (coefficients damped as 1/k^3 so
/// higher derivatives stay O(1)).
RealVec smooth_compatible_sample(const Grid& grid, double theta, Xoshiro256& rng,
                                 int modes = 4);

struct PoincareResult {
  double measured_ratio = 0.0;  ///< max ||u||_q / ||du||_q over the samples
  double bound = 0.0;           ///< C (1 + theta) / theta
};

/// Calibrate the trace-inequality constant at theta = 1 (with safety margin).
double calibrate_poincare_constant(const Grid& grid, Xoshiro256& rng, int samples,
                                   double q = 2.0);

/// Monte-Carlo check of ||u||_q <= C (1+theta)/theta ||du||_q over random
/// smooth samples projected onto the b1 = 0 trace relation.
PoincareResult poincare_check(const Grid& grid, double theta, int samples,
                              Xoshiro256& rng, double constant, double q = 2.0);

/// Theta-uniform constant for the spectral-gap bound
/// lambda_max(A) <= -theta^2 / (C^2 (1+theta)^2). The optimal constant
/// theta / ((1+theta) atan(theta/(2-theta))) increases to 2 as theta -> 0,
/// so a single-theta calibration cannot cover the sweep; 2.2 = limit + margin.
inline constexpr double kPoincareGapConstant = 2.2;

}  // namespace fklab
