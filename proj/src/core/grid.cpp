#include "core/grid.hpp"

#include <cmath>

namespace fklab {

Grid Grid::uniform(int n) {
  if (n < 8) throw ConfigError("grid: n must be >= 8, got " + std::to_string(n));
  if (n % 2 != 0) throw ConfigError("grid: n must be even, got " + std::to_string(n));
  const double h = 2.0 / n;
  RealVec nodes(n + 1);
  for (int i = 0; i <= n; ++i) nodes[i] = -1.0 + i * h;
  nodes[0] = -1.0;
  nodes[n] = 1.0;
  // enforce exact symmetry x_{n-i} = -x_i
  for (int i = 0; i <= n / 2; ++i) nodes[n - i] = -nodes[i];
  RealVec weights = RealVec::Constant(n + 1, h);
  weights[0] = 0.5 * h;
  weights[n] = 0.5 * h;
  return Grid(n, h, std::move(nodes), std::move(weights));
}

bool all_finite(const RealVec& u) { return u.allFinite(); }

bool all_finite(const ComplexVec& u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i].real()) || !std::isfinite(u[i].imag())) return false;
  }
  return true;
}

namespace {

void check_exponent(double e, const char* name) {
  if (!(e > 1.0) || !std::isfinite(e)) {
    throw ConfigError(std::string(name) + " must be in (1, inf)");
  }
}

template <typename Vec>
double lq_norm_impl(const Grid& grid, const Vec& u, double q) {
  check_exponent(q, "q");
  if (u.size() != grid.node_count()) throw ConfigError("lq_norm: size mismatch");
  if (!all_finite(u)) throw NumericError("lq_norm: non-finite values in input");
  double acc = 0.0;
  const RealVec& w = grid.quad_weights();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    acc += w[i] * std::pow(std::abs(u[i]), q);
  }
  return std::pow(acc, 1.0 / q);
}

}  // namespace

double lq_norm(const Grid& grid, const RealVec& u, double q) {
  return lq_norm_impl(grid, u, q);
}

double lq_norm(const Grid& grid, const ComplexVec& u, double q) {
  return lq_norm_impl(grid, u, q);
}

double lp_time_norm(const std::vector<double>& samples, double p, double dt) {
  check_exponent(p, "p");
  if (samples.size() < 2) throw ConfigError("lp_time_norm: need >= 2 samples");
  if (!(dt > 0.0)) throw ConfigError("lp_time_norm: dt must be positive");
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    if (!std::isfinite(samples[k])) throw NumericError("lp_time_norm: non-finite sample");
    acc += dt * std::pow(std::abs(samples[k]), p);
  }
  return std::pow(acc, 1.0 / p);
}

template <typename Vec>
Vec diff1(const Grid& grid, const Vec& u) {
  const int n = grid.n();
  if (n < 4) throw ConfigError("diff1: n must be >= 4");
  const double h = grid.h();
  Vec d(n + 1);
  d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
  for (int i = 1; i < n; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
  d[n] = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h);
  return d;
}

template <typename Vec>
Vec diff2(const Grid& grid, const Vec& u) {
  const int n = grid.n();
  if (n < 4) throw ConfigError("diff2: n must be >= 4");
  const double ih2 = 1.0 / (grid.h() * grid.h());
  Vec d(n + 1);
  d[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) * ih2;
  for (int i = 1; i < n; ++i) d[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * ih2;
  d[n] = (2.0 * u[n] - 5.0 * u[n - 1] + 4.0 * u[n - 2] - u[n - 3]) * ih2;
  return d;
}

template RealVec diff1<RealVec>(const Grid&, const RealVec&);
template ComplexVec diff1<ComplexVec>(const Grid&, const ComplexVec&);
template RealVec diff2<RealVec>(const Grid&, const RealVec&);
template ComplexVec diff2<ComplexVec>(const Grid&, const ComplexVec&);

template <typename Vec>
auto deriv_trace_left(const Grid& grid, const Vec& u) -> typename Vec::Scalar {
  return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * grid.h());
}

template <typename Vec>
auto deriv_trace_right(const Grid& grid, const Vec& u) -> typename Vec::Scalar {
  const int n = grid.n();
  return (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * grid.h());
}

template RealVec::Scalar deriv_trace_left<RealVec>(const Grid&, const RealVec&);
template ComplexVec::Scalar deriv_trace_left<ComplexVec>(const Grid&, const ComplexVec&);
template RealVec::Scalar deriv_trace_right<RealVec>(const Grid&, const RealVec&);
template ComplexVec::Scalar deriv_trace_right<ComplexVec>(const Grid&, const ComplexVec&);

void NormSpec::validate() const {
  check_exponent(p, "p");
  check_exponent(q, "q");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive");
}

TrajectoryNorms trajectory_norms(const Grid& grid,
                                 const std::vector<RealVec>& w,
                                 const std::vector<double>& sigma, double dt,
                                 const NormSpec& spec) {
  spec.validate();
  if (w.size() < 2) throw ConfigError("trajectory_norms: need >= 2 time samples");
  if (sigma.size() != w.size()) throw ConfigError("trajectory_norms: sigma/w length mismatch");
  const std::size_t m = w.size();

  std::vector<RealVec> dtw(m);
  if (m == 2) {
    dtw[0] = (w[1] - w[0]) / dt;
    dtw[1] = dtw[0];
  } else {
    dtw[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dt);
    for (std::size_t k = 1; k + 1 < m; ++k) dtw[k] = (w[k + 1] - w[k - 1]) / (2.0 * dt);
    dtw[m - 1] = (3.0 * w[m - 1] - 4.0 * w[m - 2] + w[m - 3]) / (2.0 * dt);
  }

  std::vector<double> nw(m), ndtw(m), ndxx(m), dsig(m);
  for (std::size_t k = 0; k < m; ++k) {
    nw[k] = lq_norm(grid, w[k], spec.q);
    ndtw[k] = lq_norm(grid, dtw[k], spec.q);
    ndxx[k] = lq_norm(grid, diff2(grid, w[k]), spec.q);
  }
  if (m == 2) {
    dsig[0] = (sigma[1] - sigma[0]) / dt;
    dsig[1] = dsig[0];
  } else {
    dsig[0] = (-3.0 * sigma[0] + 4.0 * sigma[1] - sigma[2]) / (2.0 * dt);
    for (std::size_t k = 1; k + 1 < m; ++k) dsig[k] = (sigma[k + 1] - sigma[k - 1]) / (2.0 * dt);
    dsig[m - 1] = (3.0 * sigma[m - 1] - 4.0 * sigma[m - 2] + sigma[m - 3]) / (2.0 * dt);
  }

  TrajectoryNorms out;
  out.e_w0 = lp_time_norm(nw, spec.p, dt);
  out.e_w1 = lp_time_norm(ndtw, spec.p, dt) + out.e_w0 + lp_time_norm(ndxx, spec.p, dt);
  out.e_sigma0 = lp_time_norm(sigma, spec.p, dt);
  out.e_sigma1 = out.e_sigma0 + lp_time_norm(dsig, spec.p, dt);
  return out;
}

RealVec random_smooth_function(const Grid& grid, Xoshiro256& rng) {
  constexpr double kHalfPi = 1.5707963267948966;
  const double a0 = rng.uniform(-0.4, 0.4);
  const double a1 = rng.uniform(-0.3, 0.3);
  double ac[3], as[3];
  for (int k = 0; k < 3; ++k) {
    const double decay = 0.4 / std::pow(1.0 + k, 3);
    ac[k] = rng.uniform(-1.0, 1.0) * decay;
    as[k] = rng.uniform(-1.0, 1.0) * decay;
  }
  RealVec u(grid.node_count());
  for (int i = 0; i < grid.node_count(); ++i) {
    const double x = grid.node(i);
    double v = a0 + a1 * x;
    for (int k = 0; k < 3; ++k) {
      v += ac[k] * std::cos((k + 1) * kHalfPi * x) + as[k] * std::sin((k + 1) * kHalfPi * x);
    }
    u[i] = v;
  }
  return u;
}

}  // namespace fklab
