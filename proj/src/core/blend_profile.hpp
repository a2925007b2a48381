#pragma once

#include <string>

#include "core/errors.hpp"

namespace fklab {

/// Odd increasing profile on [-1,1] with value +-1 at the endpoints and
/// vanishing first and second derivatives there. It weights the reflected
/// component u(-x) inside the extension operators; the endpoint flatness is
/// what makes the derivative boundary identity of the extension hold.
///
/// Constructions:
///  - quintic():      (15x - 10x^3 + 3x^5)/8. Smallest-degree polynomial with
///                    the required endpoint behavior; derivative magnitudes
///                    stay small (sup|d4| = 45), which keeps the constants in
///                    the 10h^2 identity checks tame. Default everywhere.
///  - smooth_step(w): C-infinity bump-based transition, exactly constant on
///                    [1-w, 1]. Steep: sup|d4| ~ 3.6e4 at w = 1/2, so identity
///                    residuals carry large constants on coarse grids.
///  - linear_ramp():  psi(x) = x. Violates the endpoint-flatness requirement;
///                    exists as a negative control for the verify suite.
class BlendProfile {
 public:
  enum class Kind { Quintic, SmoothStep, LinearRamp };

  static BlendProfile quintic() { return BlendProfile(Kind::Quintic, 0.0); }
  static BlendProfile smooth_step(double flat_width = 0.5);
  static BlendProfile linear_ramp() { return BlendProfile(Kind::LinearRamp, 0.0); }

  double value(double x) const;
  double deriv1(double x) const;
  double deriv2(double x) const;

  Kind kind() const { return kind_; }
  double flat_width() const { return flat_width_; }
  std::string name() const;

 private:
  BlendProfile(Kind kind, double flat_width) : kind_(kind), flat_width_(flat_width) {}

  Kind kind_;
  double flat_width_;
};

}  // namespace fklab
