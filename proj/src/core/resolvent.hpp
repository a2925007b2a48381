#pragma once

#include <functional>
#include <vector>

#include "core/fk_laplacian.hpp"
#include "core/grid.hpp"
#include "core/spectral.hpp"

namespace fklab {

/// Boundary functionals applied to the exponential solutions e^{+-sqrt(l) x}:
///   b1_pm = (1-theta0) e^{+-s} - e^{-+s}
///   b2_pm = +-s (e^{+-s} - (1-theta0) e^{-+s})
/// det = b1p*b2m - b1m*b2p; identically sqrt(lambda) * M(lambda).
struct BoundaryCoefficients {
  Complex b1_plus, b1_minus, b2_plus, b2_minus;
  Complex det;
  Complex m;  ///< boundary determinant M(lambda)
};

BoundaryCoefficients boundary_coefficients(double theta0, Complex lambda);

/// True when lambda sits on the branch cut (-inf, 0] of the principal root.
bool on_branch_cut(Complex lambda);

/// Particular solution of lambda u - u'' = f on the whole line with f
/// zero-extended outside (-1,1): convolution with e^{-s|x|}/(2s) by trapezoid
/// quadrature, evaluated at the grid nodes.
ComplexVec whole_line_solve(const Grid& grid, Complex lambda, const ComplexVec& f);

/// Derivative traces u1'(+-1) of the particular solution, from the kernel
/// derivative (one-sided limit at the matching endpoint).
Complex whole_line_deriv_trace(const Grid& grid, Complex lambda, const ComplexVec& f,
                               bool right_end);

/// Exponential correction c+ e^{s x} + c- e^{-s x} cancelling the boundary
/// residuals (b1_u1, b2_u1); throws NumericError near an eigenvalue
/// (|M(lambda)| <= 1e-12).
ComplexVec boundary_correction(const Grid& grid, double theta0, Complex lambda,
                               Complex b1_u1, Complex b2_u1);

struct KernelSolution {
  ComplexVec u;             ///< full resolvent application (lambda - A)^{-1} f
  Complex trace_b1{0, 0};   ///< boundary functionals of u via the solution
  Complex trace_b2{0, 0};   ///< representation; rounding-level by construction
};

/// Resolvent through the explicit kernel + boundary correction.
KernelSolution resolvent_apply_kernel(const Grid& grid, double theta0, Complex lambda,
                                      const ComplexVec& f);

/// Resolvent of the assembled discrete operator: (lambda - A) solved on the
/// interior by complex LU, boundary values reconstructed.
ComplexVec resolvent_apply_dense(const FkLaplacian& op, Complex lambda,
                                 const ComplexVec& f_full);

/// max over interior nodes of |lambda u - diff2(u) - f| scaled by
/// (1 + |lambda|) * max|f|; second-order schemes keep this O(h^2) uniformly
/// in |lambda|.
double interior_residual(const Grid& grid, Complex lambda, const ComplexVec& u,
                         const ComplexVec& f);

struct SweepRow {
  Complex lambda;
  double ratio;              ///< |lambda| ||u||_q / ||f||_q
  double residual;           ///< scaled interior residual
  double b1, b2;             ///< |trace residuals|
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double sup_ratio = 0.0;
  double max_residual = 0.0;
  double max_boundary = 0.0;
};

SweepResult resolvent_sweep(const Grid& grid, double theta0, double q,
                            const std::vector<Complex>& lambdas,
                            const std::vector<ComplexVec>& forcings);

/// Integration path for the operator calculus: two rays at +-angle joined by
/// an arc of radius r_inner around the origin, truncated at r_outer;
/// Gauss-Legendre panels on log-radius.
struct Contour {
  double angle = 2.356194490192345;  // 3*pi/4
  double r_inner = 1e-3;
  double r_outer = 1e6;
  int points_per_decade = 16;
  int arc_points = 32;

  /// Quadrature nodes (lambda_j, w_j) such that ∮ f dlambda ≈ sum w_j f(lambda_j),
  /// oriented from inf*e^{-i angle} to inf*e^{+i angle} (spectrum on the left).
  std::vector<std::pair<Complex, Complex>> nodes() const;

  /// Outer radius so |e^{t lambda}| <= ~1e-14 at the truncation point.
  static Contour for_exponential(double t);
};

enum class ResolventRoute { Dense, Kernel };

/// Operator calculus h(A) u0 = (1/2 pi i) ∮ h(lambda) (lambda - A)^{-1} u0 dlambda.
/// Checks the weight tail |h(lambda_R)| / (1 + R) against tail_tol and throws
/// NumericError when the truncation cannot be trusted.
RealVec functional_calculus(const FkLaplacian& op, const std::function<Complex(Complex)>& h,
                            const Contour& contour, const RealVec& u0_full,
                            ResolventRoute route = ResolventRoute::Dense,
                            double tail_tol = 1e-12);

}  // namespace fklab
