#pragma once

// Modified Bessel functions of the second kind, orders 0 and 1, for complex
// arguments in the right half-plane.

#include "sixbie/types.hpp"

namespace sixbie {

struct BesselValue {
  cplx value{};
  real est_error = 0.0;  // a posteriori absolute error estimate on `value`
  /// When set, `value` holds e^{z} K(z); the caller must multiply by e^{−z}.
  bool scaled = false;
};

/// Above this modulus bessel_k switches to the exponentially scaled form.
inline constexpr real kBesselScaleThreshold = 690.0;

/// K_order(z), order ∈ {0, 1}, Re z > 0, |z| ≥ 1e−8. Ascending series for
/// |z| ≤ 2, Temme's continued fraction for 2 < |z| < 17 and the large-argument
/// expansion beyond. Throws DomainError outside the supported domain.
BesselValue bessel_k(int order, cplx z);

/// e^{z} K_order(z) on the same domain; never underflows.
BesselValue bessel_k_scaled(int order, cplx z);

/// K0 and K1 together, unscaled. Hot path for kernel evaluation; the same
/// domain rules apply.
void bessel_k01(cplx z, cplx& k0, cplx& k1);

/// Independent evaluation of K0 by adaptive quadrature of the integral
/// representation ∫₀^∞ e^{−z cosh t} dt, taken along the steepest-descent
/// path through t = 0. Throws ConvergenceFailure if target_error (relative)
/// cannot be met.
BesselValue bessel_k0_reference(cplx z, real target_error = 1e-13);

}  // namespace sixbie
