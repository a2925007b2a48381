#pragma once

#include <utility>

#include "core/grid.hpp"

namespace fklab {

/// Boundary condition residuals at filtration ratio theta:
///   b1 = (1 - theta) u(+1) - u(-1)
///   b2 = u'(+1) - (1 - theta) u'(-1)
/// with second-order one-sided stencils for the derivative traces.
template <typename Vec>
std::pair<typename Vec::Scalar, typename Vec::Scalar> boundary_residuals(
    const Grid& grid, double theta, const Vec& u) {
  using S = typename Vec::Scalar;
  const int n = grid.n();
  const S b1 = (1.0 - theta) * u[n] - u[0];
  const S b2 = deriv_trace_right(grid, u) - (1.0 - theta) * deriv_trace_left(grid, u);
  return {b1, b2};
}

/// Discrete second-derivative operator on (-1,1) with the coupled two-endpoint
/// boundary conditions b1 = b2 = 0 eliminated.
///
/// Interior rows are the 3-point Laplacian; the boundary unknowns v_0, v_n are
/// recovered from the interior values by solving the 2x2 system {b1=0, b2=0}
/// (one-sided derivative stencils) and substituted into the first and last
/// rows, leaving a dense (n-1)x(n-1) matrix.
class FkLaplacian {
 public:
  FkLaplacian(const Grid& grid, double theta);

  double theta() const { return theta_; }
  const Grid& grid() const { return grid_; }
  int interior_dim() const { return grid_.n() - 1; }
  const RealMat& matrix() const { return matrix_; }

  /// Reconstruct the full nodal vector (boundary values from the elimination
  /// maps). The result satisfies b1 = b2 = 0 to rounding.
  RealVec to_full(const RealVec& interior) const;
  ComplexVec to_full(const ComplexVec& interior) const;
  RealVec to_interior(const RealVec& full) const;

  /// Elimination maps: v_0 = w0_coeffs . interior, v_n = wn_coeffs . interior.
  const RealVec& left_coeffs() const { return c0_; }
  const RealVec& right_coeffs() const { return cn_; }

 private:
  Grid grid_;
  double theta_;
  RealMat matrix_;
  RealVec c0_, cn_;  // sparse in effect: only 4 nonzeros each
};

/// Quadrature of |u'|^2; equals -<Au, u> up to O(h^2) for boundary-compatible u.
double energy_form(const Grid& grid, const RealVec& u_full);

/// Trapezoid inner product restricted to interior nodes (weight h), matching
/// the discrete evolution's natural pairing.
double interior_dot(const Grid& grid, const RealVec& a, const RealVec& b);

}  // namespace fklab
