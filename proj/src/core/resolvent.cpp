#include "core/resolvent.hpp"

#include <cmath>

namespace fklab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

}  // namespace

bool on_branch_cut(Complex lambda) {
  return lambda.imag() == 0.0 && lambda.real() <= 0.0;
}

BoundaryCoefficients boundary_coefficients(double theta0, Complex lambda) {
  const Complex s = std::sqrt(lambda);
  const Complex ep = std::exp(s), em = std::exp(-s);
  const double b = 1.0 - theta0;
  BoundaryCoefficients out;
  out.b1_plus = b * ep - em;
  out.b1_minus = b * em - ep;
  out.b2_plus = s * (ep - b * em);
  out.b2_minus = -s * (em - b * ep);
  out.det = out.b1_plus * out.b2_minus - out.b1_minus * out.b2_plus;
  const Complex c = ep - b * em;
  out.m = out.b1_plus * out.b1_plus + c * c;
  return out;
}

ComplexVec whole_line_solve(const Grid& grid, Complex lambda, const ComplexVec& f) {
  if (on_branch_cut(lambda)) {
    throw NumericError("whole_line_solve: lambda on the branch cut (-inf, 0]");
  }
  const Complex s = std::sqrt(lambda);
  const int m = grid.node_count();
  const RealVec& w = grid.quad_weights();
  ComplexVec u(m);
  for (int i = 0; i < m; ++i) {
    Complex acc(0, 0);
    const double xi = grid.node(i);
    for (int j = 0; j < m; ++j) {
      acc += w[j] * std::exp(-s * std::abs(xi - grid.node(j))) * f[j];
    }
    u[i] = acc / (2.0 * s);
  }
  return u;
}

Complex whole_line_deriv_trace(const Grid& grid, Complex lambda, const ComplexVec& f,
                               bool right_end) {
  const Complex s = std::sqrt(lambda);
  const int m = grid.node_count();
  const RealVec& w = grid.quad_weights();
  Complex acc(0, 0);
  if (right_end) {
    // x = +1, all y <= x: k'(x - y) = -e^{-s(1-y)}/2 from inside
    for (int j = 0; j < m; ++j) acc += w[j] * std::exp(-s * (1.0 - grid.node(j))) * f[j];
    return -0.5 * acc;
  }
  for (int j = 0; j < m; ++j) acc += w[j] * std::exp(-s * (grid.node(j) + 1.0)) * f[j];
  return 0.5 * acc;
}

ComplexVec boundary_correction(const Grid& grid, double theta0, Complex lambda,
                               Complex b1_u1, Complex b2_u1) {
  const BoundaryCoefficients bc = boundary_coefficients(theta0, lambda);
  if (std::abs(bc.m) <= 1e-12) {
    throw NumericError("boundary_correction: lambda is numerically an eigenvalue (M ~ 0)");
  }
  const Complex cp = (-b1_u1 * bc.b2_minus + b2_u1 * bc.b1_minus) / bc.det;
  const Complex cm = (-bc.b1_plus * b2_u1 + bc.b2_plus * b1_u1) / bc.det;
  const Complex s = std::sqrt(lambda);
  ComplexVec u2(grid.node_count());
  for (int i = 0; i < grid.node_count(); ++i) {
    const double x = grid.node(i);
    u2[i] = cp * std::exp(s * x) + cm * std::exp(-s * x);
  }
  return u2;
}

KernelSolution resolvent_apply_kernel(const Grid& grid, double theta0, Complex lambda,
                                      const ComplexVec& f) {
  const Complex s = std::sqrt(lambda);
  const ComplexVec u1 = whole_line_solve(grid, lambda, f);
  const int n = grid.n();
  const double b = 1.0 - theta0;
  const Complex du1_r = whole_line_deriv_trace(grid, lambda, f, true);
  const Complex du1_l = whole_line_deriv_trace(grid, lambda, f, false);
  const Complex b1_u1 = b * u1[n] - u1[0];
  const Complex b2_u1 = du1_r - b * du1_l;
  const ComplexVec u2 = boundary_correction(grid, theta0, lambda, b1_u1, b2_u1);

  KernelSolution sol;
  sol.u = u1 + u2;
  // residuals of the enforced trace functionals, with u2's traces analytic
  const Complex ep = std::exp(s), em = std::exp(-s);
  const BoundaryCoefficients bc = boundary_coefficients(theta0, lambda);
  const Complex cp = (-b1_u1 * bc.b2_minus + b2_u1 * bc.b1_minus) / bc.det;
  const Complex cm = (-bc.b1_plus * b2_u1 + bc.b2_plus * b1_u1) / bc.det;
  const Complex du2_right = cp * s * ep - cm * s * em;
  const Complex du2_left = cp * s * em - cm * s * ep;
  sol.trace_b1 = b * (u1[n] + u2[n]) - (u1[0] + u2[0]);
  sol.trace_b2 = (du1_r + du2_right) - b * (du1_l + du2_left);
  return sol;
}

ComplexVec resolvent_apply_dense(const FkLaplacian& op, Complex lambda,
                                 const ComplexVec& f_full) {
  const int m = op.interior_dim();
  ComplexMat sys = -op.matrix().cast<Complex>();
  sys.diagonal().array() += lambda;
  const ComplexVec f_int = f_full.segment(1, m);
  const ComplexVec u_int = sys.partialPivLu().solve(f_int);
  return op.to_full(u_int);
}

double interior_residual(const Grid& grid, Complex lambda, const ComplexVec& u,
                         const ComplexVec& f) {
  const ComplexVec d2 = diff2(grid, u);
  double worst = 0.0, fmax = 0.0;
  for (int i = 1; i < grid.n(); ++i) {
    worst = std::max(worst, std::abs(lambda * u[i] - d2[i] - f[i]));
  }
  for (int i = 0; i <= grid.n(); ++i) fmax = std::max(fmax, std::abs(f[i]));
  if (fmax == 0.0) return worst;
  return worst / ((1.0 + std::abs(lambda)) * fmax);
}

SweepResult resolvent_sweep(const Grid& grid, double theta0, double q,
                            const std::vector<Complex>& lambdas,
                            const std::vector<ComplexVec>& forcings) {
  SweepResult out;
  for (const Complex& lambda : lambdas) {
    for (const ComplexVec& f : forcings) {
      const KernelSolution sol = resolvent_apply_kernel(grid, theta0, lambda, f);
      SweepRow row;
      row.lambda = lambda;
      const double nf = lq_norm(grid, f, q);
      row.ratio = nf > 0.0 ? std::abs(lambda) * lq_norm(grid, sol.u, q) / nf : 0.0;
      row.residual = interior_residual(grid, lambda, sol.u, f);
      row.b1 = std::abs(sol.trace_b1);
      row.b2 = std::abs(sol.trace_b2);
      out.sup_ratio = std::max(out.sup_ratio, row.ratio);
      out.max_residual = std::max(out.max_residual, row.residual);
      out.max_boundary = std::max(out.max_boundary, std::max(row.b1, row.b2));
      out.rows.push_back(row);
    }
  }
  return out;
}

std::vector<std::pair<Complex, Complex>> Contour::nodes() const {
  if (!(angle > 1.5707963267948966 && angle < 3.141592653589793)) {
    throw ConfigError("contour: angle must lie in (pi/2, pi)");
  }
  if (!(r_outer > r_inner && r_inner >= 0.0)) {
    throw ConfigError("contour: need r_outer > r_inner >= 0");
  }
  std::vector<std::pair<Complex, Complex>> out;
  const double s_lo = std::log(r_inner), s_hi = std::log(r_outer);
  const double decades = (s_hi - s_lo) / std::log(10.0);
  const int panels = std::max(1, static_cast<int>(std::ceil(decades * points_per_decade / 8.0)));
  const double ds = (s_hi - s_lo) / panels;
  const Complex ray_lo = std::polar(1.0, -angle);
  const Complex ray_hi = std::polar(1.0, +angle);
  // lower ray, from r_outer inward: dlambda = -e^{-i angle} dr
  for (int p = 0; p < panels; ++p) {
    const double a = s_lo + p * ds, b = a + ds;
    for (int g = 0; g < 8; ++g) {
      const double s = 0.5 * (a + b) + 0.5 * ds * kGlNode[g];
      const double r = std::exp(s);
      const double w = 0.5 * ds * kGlWeight[g] * r;  // dr = r ds
      out.emplace_back(r * ray_lo, -ray_lo * w);
    }
  }
  // arc at r_inner, psi from -angle to +angle: dlambda = i r e^{i psi} dpsi
  {
    const int arc_panels = std::max(1, arc_points / 8);
    const double dpsi = 2.0 * angle / arc_panels;
    for (int p = 0; p < arc_panels; ++p) {
      const double a = -angle + p * dpsi, b = a + dpsi;
      for (int g = 0; g < 8; ++g) {
        const double psi = 0.5 * (a + b) + 0.5 * dpsi * kGlNode[g];
        const Complex lam = std::polar(r_inner, psi);
        out.emplace_back(lam, Complex(0, 1) * lam * (0.5 * dpsi * kGlWeight[g]));
      }
    }
  }
  // upper ray, outward: dlambda = e^{i angle} dr
  for (int p = 0; p < panels; ++p) {
    const double a = s_lo + p * ds, b = a + ds;
    for (int g = 0; g < 8; ++g) {
      const double s = 0.5 * (a + b) + 0.5 * ds * kGlNode[g];
      const double r = std::exp(s);
      const double w = 0.5 * ds * kGlWeight[g] * r;
      out.emplace_back(r * ray_hi, ray_hi * w);
    }
  }
  return out;
}

Contour Contour::for_exponential(double t) {
  if (!(t > 0.0)) throw ConfigError("contour: exponential weight needs t > 0");
  Contour c;
  const double reach = 14.0 * std::log(10.0) / (t * std::abs(std::cos(c.angle)));
  c.r_outer = std::max(50.0, reach);
  return c;
}

RealVec functional_calculus(const FkLaplacian& op, const std::function<Complex(Complex)>& h,
                            const Contour& contour, const RealVec& u0_full,
                            ResolventRoute route, double tail_tol) {
  const Complex lam_tail = std::polar(contour.r_outer, contour.angle);
  const double tail = std::abs(h(lam_tail)) / (1.0 + contour.r_outer);
  if (!(tail <= tail_tol)) {
    throw NumericError("functional_calculus: weight tail " + std::to_string(tail) +
                       " exceeds tolerance; enlarge r_outer");
  }
  const Grid& grid = op.grid();
  const ComplexVec u0 = u0_full.cast<Complex>();
  ComplexVec acc = ComplexVec::Zero(grid.node_count());
  for (const auto& [lambda, weight] : contour.nodes()) {
    ComplexVec ru;
    if (route == ResolventRoute::Dense) {
      ru = resolvent_apply_dense(op, lambda, u0);
    } else {
      ru = resolvent_apply_kernel(grid, op.theta(), lambda, u0).u;
    }
    acc += (weight * h(lambda)) * ru;
  }
  acc /= Complex(0, kTwoPi);
  return acc.real();
}

}  // namespace fklab
