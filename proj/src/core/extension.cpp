#include "core/extension.hpp"

#include <cmath>

namespace fklab {

ExtensionOperator::ExtensionOperator(Grid grid, BlendProfile psi)
    : grid_(std::move(grid)), psi_(std::move(psi)) {
  const int m = grid_.node_count();
  psi_vals_.resize(m);
  psi_d1_.resize(m);
  psi_d2_.resize(m);
  for (int i = 0; i < m; ++i) {
    const double x = grid_.node(i);
    psi_vals_[i] = psi_.value(x);
    psi_d1_[i] = psi_.deriv1(x);
    psi_d2_[i] = psi_.deriv2(x);
  }
}

namespace {
double denom(double alpha) {
  const double b = 1.0 - alpha;
  return 1.0 + b * b;
}
}  // namespace

RealVec ExtensionOperator::apply(double alpha, const RealVec& u) const {
  const double d = denom(alpha);
  const RealVec ru = reflect(u);
  return ((1.0 - alpha) * u + psi_vals_.cwiseProduct(ru)) / d;
}

RealVec ExtensionOperator::apply_flipped(double alpha, const RealVec& u) const {
  const double d = denom(alpha);
  const RealVec ru = reflect(u);
  return ((1.0 - alpha) * u - psi_vals_.cwiseProduct(ru)) / d;
}

RealVec ExtensionOperator::remainder(int m, double alpha, const RealVec& u) const {
  const double d = denom(alpha);
  if (m == 1) {
    return psi_d1_.cwiseProduct(reflect(u)) / d;
  }
  if (m == 2) {
    const RealVec du_refl = reflect(RealVec(diff1(grid_, u)));
    return (-2.0 * psi_d1_.cwiseProduct(du_refl) + psi_d2_.cwiseProduct(reflect(u))) / d;
  }
  throw ConfigError("extension remainder: order m must be 1 or 2");
}

RealMat ExtensionOperator::matrix(double alpha, bool flipped) const {
  const int m = grid_.node_count();
  const double d = denom(alpha);
  const double sign = flipped ? -1.0 : 1.0;
  RealMat out = RealMat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    out(i, i) += (1.0 - alpha) / d;
    out(i, m - 1 - i) += sign * psi_vals_[i] / d;
  }
  return out;
}

void Homogenizer::check_radius(double delta) {
  if (!(std::abs(delta) < 0.5)) {
    throw RadiusError("homogenizer: |theta - theta0| = " + std::to_string(std::abs(delta)) +
                      " outside the Neumann-series radius 1/2");
  }
}

RealVec Homogenizer::apply(double theta, const RealVec& u) const {
  return u - (theta - theta0_) * ext_.apply(theta0_, u);
}

RealVec Homogenizer::apply_flipped(double theta, const RealVec& u) const {
  return u - (theta - theta0_) * ext_.apply_flipped(theta0_, u);
}

namespace {

template <typename ApplyFn>
RealVec neumann_series(double delta, const RealVec& u, const SeriesOptions& opts,
                       ApplyFn&& apply_ext) {
  Homogenizer::check_radius(delta);
  RealVec sum = u;
  RealVec term = u;
  const double scale = std::max(1.0, u.norm());
  for (int k = 0; k < opts.max_terms; ++k) {
    term = delta * apply_ext(term);
    sum += term;
    if (term.norm() <= opts.tol * scale) return sum;
  }
  // geometric decay with ratio <= 2|delta| < 1 guarantees we land here only
  // for pathological tolerances
  throw NumericError("homogenizer: Neumann series did not reach tolerance");
}

}  // namespace

RealVec Homogenizer::apply_inverse(double theta, const RealVec& u,
                                   const SeriesOptions& opts) const {
  return neumann_series(theta - theta0_, u, opts,
                        [&](const RealVec& v) { return ext_.apply(theta0_, v); });
}

RealVec Homogenizer::apply_flipped_inverse(double theta, const RealVec& u,
                                           const SeriesOptions& opts) const {
  return neumann_series(theta - theta0_, u, opts,
                        [&](const RealVec& v) { return ext_.apply_flipped(theta0_, v); });
}

RealVec Homogenizer::apply_inverse_dense(double theta, const RealVec& u) const {
  const double delta = theta - theta0_;
  check_radius(delta);
  const int m = grid().node_count();
  RealMat sys = RealMat::Identity(m, m) - delta * ext_.matrix(theta0_, false);
  return sys.partialPivLu().solve(u);
}

RealVec Homogenizer::inverse_time_derivative(double theta, double theta_prime,
                                             const RealVec& phi, const RealVec& dphi_dt,
                                             const SeriesOptions& opts) const {
  RealVec ginv_phi = apply_inverse(theta, phi, opts);
  RealVec correction = apply_inverse(theta, ext_.apply(theta0_, ginv_phi), opts);
  return apply_inverse(theta, dphi_dt, opts) + theta_prime * correction;
}

}  // namespace fklab
