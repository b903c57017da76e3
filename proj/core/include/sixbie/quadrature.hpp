#pragma once

#include <functional>

#include "sixbie/types.hpp"

namespace sixbie {

struct QuadratureResult {
  cplx value{};
  real error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Globally adaptive 7/15-point Gauss–Kronrod integration of a complex
/// integrand over [a, b]; stops when the summed error estimate falls below
/// max(abs_tol, rel_tol·|I|) or after max_intervals subdivisions.
QuadratureResult integrate_adaptive(const std::function<cplx(real)>& f, real a, real b,
                                    real abs_tol, real rel_tol, int max_intervals = 4000);

}  // namespace sixbie
