#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace fklab {

using RealVec = Eigen::VectorXd;
using ComplexVec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using ComplexMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Uniform symmetric grid on (-1, 1) with nodes x_i = -1 + i*h, i = 0..n.
///
/// n is required to be even so that x -> -x is an exact node permutation
/// (x_{n-i} = -x_i), which keeps the reflection-based extension operators
/// free of interpolation error.
class Grid {
 public:
  static Grid uniform(int n);

  int n() const { return n_; }
  double h() const { return h_; }
  int node_count() const { return n_ + 1; }
  double node(int i) const { return nodes_[i]; }
  const RealVec& nodes() const { return nodes_; }

  /// Trapezoid quadrature weights (h/2 at the ends, h inside).
  const RealVec& quad_weights() const { return weights_; }

 private:
  Grid(int n, double h, RealVec nodes, RealVec weights)
      : n_(n), h_(h), nodes_(std::move(nodes)), weights_(std::move(weights)) {}

  int n_;
  double h_;
  RealVec nodes_;
  RealVec weights_;
};

/// reflect(u)_i = u_{n-i}; exact involution on a symmetric grid.
template <typename Vec>
Vec reflect(const Vec& u) {
  return u.reverse();
}

bool all_finite(const RealVec& u);
bool all_finite(const ComplexVec& u);

/// Discrete L^q norm with trapezoid weights; q in (1, inf).
double lq_norm(const Grid& grid, const RealVec& u, double q);
double lq_norm(const Grid& grid, const ComplexVec& u, double q);

/// Discrete L^p(0,T) norm of uniformly sampled values, left-endpoint rule:
/// samples s_0..s_M at spacing dt cover [0, M*dt]; the last sample is the
/// right endpoint and carries no weight.
double lp_time_norm(const std::vector<double>& samples, double p, double dt);

/// O(h^2) first/second derivatives: central stencils inside, second-order
/// one-sided stencils at the endpoints. Exact on degree <= 1 / <= 2.
template <typename Vec>
Vec diff1(const Grid& grid, const Vec& u);
template <typename Vec>
Vec diff2(const Grid& grid, const Vec& u);

/// One-sided second-order derivative traces at x = -1 and x = +1.
template <typename Vec>
auto deriv_trace_left(const Grid& grid, const Vec& u) -> typename Vec::Scalar;
template <typename Vec>
auto deriv_trace_right(const Grid& grid, const Vec& u) -> typename Vec::Scalar;

struct NormSpec {
  double p = 2.0;
  double q = 2.0;
  double T = 1.0;
  void validate() const;
};

struct TrajectoryNorms {
  double e_w0 = 0.0;     ///< L^p_t L^q_x of w
  double e_w1 = 0.0;     ///< ||dt w|| + ||w|| + ||dxx w|| in L^p_t L^q_x
  double e_sigma0 = 0.0; ///< L^p(0,T) of sigma
  double e_sigma1 = 0.0; ///< L^p of sigma plus L^p of sigma'
};

/// Discrete space-time norms of a sampled trajectory. Time derivative by
/// centered differences (one-sided at the ends); requires >= 2 samples.
TrajectoryNorms trajectory_norms(const Grid& grid,
                                 const std::vector<RealVec>& w,
                                 const std::vector<double>& sigma, double dt,
                                 const NormSpec& spec);

/// Random band-limited function: low Fourier modes with decaying weights
/// plus constant and linear parts. Third derivative stays O(10) so that
/// pinned 10h^2-style tolerances are meaningful.
RealVec random_smooth_function(const Grid& grid, Xoshiro256& rng);

}  // namespace fklab
