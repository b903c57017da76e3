#include <fmt/format.h>

#include "sixbie/boundary_solver.hpp"
#include "sixbie/error.hpp"
#include "sixbie/quadrature.hpp"

namespace sixbie {

namespace {

// The nine traces at x of the three potentials with unit density.
std::array<cplx, 9> traces_at(const TraceBlock& block, const BoundaryCurve& curve, Vec2 x, Vec2 nx, real t0,
                              real abs_scale) {
  std::array<cplx, 9> out{};
  for (int k = 0; k < 9; ++k) {
    auto f = [&](real s) -> cplx {
      const Vec2 y = curve.position(s);
      const Vec2 dx = x - y;
      const real r = dx.norm();
      cplx v[9];
      block.eval(r, dx * (1.0 / r), nx, curve.inward_normal(s), v);
      return v[k] * curve.speed(s);
    };
    QuadratureResult a = integrate_adaptive(f, t0 - pi, t0, 1e-15 * abs_scale, 1e-13, 20000);
    QuadratureResult b = integrate_adaptive(f, t0, t0 + pi, 1e-15 * abs_scale, 1e-13, 20000);
    if (!a.converged || !b.converged)
      throw Error(ErrorCode::ConvergenceFailure, fmt::format("jump calibration quadrature failed for trace {}", k));
    out[k] = a.value + b.value;
  }
  return out;
}

// Polynomial extrapolation to h = 0 for steps halving at each level.
cplx richardson(const std::vector<cplx>& d) {
  std::vector<cplx> t = d;
  const int n = int(t.size());
  for (int j = 1; j < n; ++j) {
    const real f = std::ldexp(1.0, j);
    for (int k = n - 1; k >= j; --k) t[k] = (f * t[k] - t[k - 1]) / (f - 1.0);
  }
  return t.back();
}

}  // namespace

JumpCalibration calibrate_jumps(const KernelContext& ctx, const BoundaryCurve& curve, CalibrationOptions opts) {
  JumpCalibration cal;
  cal.analytic = analytic_jumps(ctx);
  cal.target_t = opts.target_t;
  cal.tolerance = opts.tolerance;
  const TraceBlock block(ctx);
  const Vec2 z = curve.position(opts.target_t);
  const Vec2 nz = curve.inward_normal(opts.target_t);

  // Absolute scale of each trace row from a coarse trapezoid pass at the
  // first step.
  std::array<real, 3> scale{};
  {
    const Vec2 x = z + nz * opts.h0;
    constexpr int m = 512;
    for (int j = 0; j < m; ++j) {
      const real s = 2.0 * pi * j / m;
      const Vec2 dx = x - curve.position(s);
      const real r = dx.norm();
      cplx v[9];
      block.eval(r, dx * (1.0 / r), nz, curve.inward_normal(s), v);
      for (int k = 0; k < 9; ++k) scale[k / 3] += std::abs(v[k]) * curve.speed(s) * 2.0 * pi / m;
    }
  }
  const real abs_scale = std::max({scale[0], scale[1], scale[2]});

  std::array<std::vector<cplx>, 9> diffs;
  std::array<real, 3> trace_mag{};
  for (int l = 0; l < opts.levels; ++l) {
    const real h = opts.h0 * std::ldexp(1.0, -l);
    cal.steps.push_back(h);
    const auto in = traces_at(block, curve, z + nz * h, nz, opts.target_t, abs_scale);
    const auto out = traces_at(block, curve, z - nz * h, nz, opts.target_t, abs_scale);
    for (int k = 0; k < 9; ++k) {
      diffs[k].push_back(0.5 * (in[k] - out[k]));
      trace_mag[k / 3] = std::max(trace_mag[k / 3], std::abs(0.5 * (in[k] + out[k])));
    }
  }

  std::string worst;
  for (int row = 0; row < 3; ++row) {
    real row_jump = 0.0;
    for (int col = 0; col < 3; ++col) row_jump = std::max(row_jump, std::abs(cal.analytic[row][col]));
    const real row_scale = std::max(trace_mag[row], row_jump);
    for (int col = 0; col < 3; ++col) {
      const cplx m = richardson(diffs[3 * row + col]);
      cal.measured[row][col] = m;
      const cplx a = cal.analytic[row][col];
      const bool zero = std::abs(a) <= 1e-12 * row_scale;
      cal.zero_case[row][col] = zero;
      cal.deviation[row][col] = zero ? std::abs(m) / row_scale : std::abs(m - a) / std::abs(a);
      if (cal.deviation[row][col] > opts.tolerance && worst.empty())
        worst = fmt::format("trace {} of w{}: measured ({:.6e}, {:.6e}) vs analytic ({:.6e}, {:.6e})", row, col + 1,
                            m.real(), m.imag(), a.real(), a.imag());
    }
  }
  if (!worst.empty() && opts.throw_on_mismatch) throw Error(ErrorCode::CalibrationMismatch, worst);
  return cal;
}

}  // namespace sixbie
