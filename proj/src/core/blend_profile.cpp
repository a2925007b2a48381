#include "core/blend_profile.hpp"

#include <cmath>

namespace fklab {

namespace {

// rho(r) = exp(-1/r) for r > 0, else 0; flat to all orders at r = 0.
double rho(double r) { return r > 0.0 ? std::exp(-1.0 / r) : 0.0; }
double rho1(double r) { return r > 0.0 ? rho(r) / (r * r) : 0.0; }
double rho2(double r) {
  return r > 0.0 ? rho(r) * (1.0 / (r * r * r * r) - 2.0 / (r * r * r)) : 0.0;
}

// s(r) = rho(r) / (rho(r) + rho(1-r)): C-infinity step from 0 to 1 on [0,1].
double step_val(double r) {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  const double a = rho(r), b = rho(1.0 - r);
  return a / (a + b);
}

double step_d1(double r) {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  const double a = rho(r), b = rho(1.0 - r);
  const double a1 = rho1(r), b1 = -rho1(1.0 - r);
  const double d = a + b;
  return (a1 * b - a * b1) / (d * d);
}

double step_d2(double r) {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  const double a = rho(r), b = rho(1.0 - r);
  const double a1 = rho1(r), b1 = -rho1(1.0 - r);
  const double a2 = rho2(r), b2 = rho2(1.0 - r);
  const double d = a + b;
  const double num = a1 * b - a * b1;       // numerator of s' * d^2
  const double num1 = a2 * b - a * b2;      // d/dr of num (cross terms cancel)
  const double d1 = a1 + b1;
  return (num1 * d - 2.0 * num * d1) / (d * d * d);
}

}  // namespace

BlendProfile BlendProfile::smooth_step(double flat_width) {
  if (!(flat_width > 0.0 && flat_width < 1.0)) {
    throw ConfigError("blend profile: flat_width must be in (0, 1)");
  }
  return BlendProfile(Kind::SmoothStep, flat_width);
}

double BlendProfile::value(double x) const {
  switch (kind_) {
    case Kind::Quintic: {
      const double x2 = x * x;
      return x * (15.0 - 10.0 * x2 + 3.0 * x2 * x2) / 8.0;
    }
    case Kind::SmoothStep: {
      const double t = std::abs(x) / (1.0 - flat_width_);
      const double s = step_val(t);
      return x >= 0.0 ? s : -s;
    }
    case Kind::LinearRamp:
      return x;
  }
  return 0.0;
}

double BlendProfile::deriv1(double x) const {
  switch (kind_) {
    case Kind::Quintic: {
      const double y = 1.0 - x * x;
      return 15.0 * y * y / 8.0;
    }
    case Kind::SmoothStep: {
      const double scale = 1.0 / (1.0 - flat_width_);
      return step_d1(std::abs(x) * scale) * scale;  // even in x
    }
    case Kind::LinearRamp:
      return 1.0;
  }
  return 0.0;
}

double BlendProfile::deriv2(double x) const {
  switch (kind_) {
    case Kind::Quintic:
      return -60.0 * x * (1.0 - x * x) / 8.0;
    case Kind::SmoothStep: {
      const double scale = 1.0 / (1.0 - flat_width_);
      const double d2 = step_d2(std::abs(x) * scale) * scale * scale;
      return x >= 0.0 ? d2 : -d2;  // odd in x
    }
    case Kind::LinearRamp:
      return 0.0;
  }
  return 0.0;
}

std::string BlendProfile::name() const {
  switch (kind_) {
    case Kind::Quintic:
      return "quintic";
    case Kind::SmoothStep:
      return "smooth_step";
    case Kind::LinearRamp:
      return "linear_ramp";
  }
  return "?";
}

}  // namespace fklab
