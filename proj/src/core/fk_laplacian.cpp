#include "core/fk_laplacian.hpp"

#include <cmath>

namespace fklab {

FkLaplacian::FkLaplacian(const Grid& grid, double theta) : grid_(grid), theta_(theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw ConfigError("fk operator: theta must lie in [0, 1]");
  }
  const int n = grid.n();
  const int m = n - 1;
  const double b = 1.0 - theta;

  // Unknowns (v0, vn) from {b1 = 0, b2 = 0} with one-sided stencils:
  //   -v0 + b vn = 0
  //   3 b v0 + 3 vn = 4 v_{n-1} - v_{n-2} + b (4 v_1 - v_2)
  const double det = -3.0 * (1.0 + b * b);
  if (std::abs(det) < 1e-12) throw NumericError("fk operator: singular boundary system");
  const double inv = 1.0 / (3.0 * (1.0 + b * b));

  cn_ = RealVec::Zero(m);
  cn_[0] = 4.0 * b * inv;
  cn_[1] = -b * inv;
  cn_[m - 2] = -inv;
  cn_[m - 1] = 4.0 * inv;
  c0_ = b * cn_;

  const double ih2 = 1.0 / (grid.h() * grid.h());
  matrix_ = RealMat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    matrix_(i, i) = -2.0 * ih2;
    if (i > 0) matrix_(i, i - 1) = ih2;
    if (i + 1 < m) matrix_(i, i + 1) = ih2;
  }
  matrix_.row(0) += ih2 * c0_.transpose();      // v_0 enters row of node 1
  matrix_.row(m - 1) += ih2 * cn_.transpose();  // v_n enters row of node n-1
}

RealVec FkLaplacian::to_full(const RealVec& interior) const {
  const int n = grid_.n();
  RealVec full(n + 1);
  full.segment(1, n - 1) = interior;
  full[0] = c0_.dot(interior);
  full[n] = cn_.dot(interior);
  return full;
}

ComplexVec FkLaplacian::to_full(const ComplexVec& interior) const {
  const int n = grid_.n();
  ComplexVec full(n + 1);
  full.segment(1, n - 1) = interior;
  full[0] = interior.cwiseProduct(c0_.cast<Complex>()).sum();
  full[n] = interior.cwiseProduct(cn_.cast<Complex>()).sum();
  return full;
}

RealVec FkLaplacian::to_interior(const RealVec& full) const {
  return full.segment(1, grid_.n() - 1);
}

double energy_form(const Grid& grid, const RealVec& u_full) {
  const RealVec du = diff1(grid, u_full);
  return grid.quad_weights().dot(RealVec(du.cwiseProduct(du)));
}

double interior_dot(const Grid& grid, const RealVec& a, const RealVec& b) {
  return grid.h() * a.dot(b);
}

}  // namespace fklab
