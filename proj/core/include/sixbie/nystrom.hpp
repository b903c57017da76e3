#pragma once

// Nyström discretisation of the three boundary traces (value, ∂/∂n,
// ∂/∂n Δ²) of the potentials w1, w2, w3.
//
// Targets are the n coarse nodes; sources live on a nested fine grid of
// n_f = p·n nodes carrying the trigonometric interpolant of the coarse
// density. Each source kernel is split as
//   T(t, s)|γ′(s)| = L(t, s) ln(4 sin²((t − s)/2)) + M(t, s),
// with L = −½ D[A]|γ′| χ(|κ| r), where D is the trace operator, A the
// coefficient of −ln r in the profile and χ a smooth cutoff. The log part is
// integrated with Kress weights, the rest with the trapezoid rule, and the
// coincident-node values of L and M come from symmetric Lagrange
// interpolation.

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "sixbie/geometry.hpp"
#include "sixbie/kernels.hpp"

namespace sixbie {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using JumpTable = std::array<std::array<cplx, 3>, 3>;

struct NystromOptions {
  /// Fine-to-coarse ratio p; 0 picks the smallest even p with
  /// max|κ| · max|γ′| · 2π/n_f ≤ resolution.
  int upsample = 0;
  real resolution = 0.2;
  real window_u1 = 1.0;
  real window_u2 = 12.0;
  /// Scale s in χ(s r); defaults to max|κ|. Pin it when comparing solves
  /// at different λ that must depend analytically on λ.
  std::optional<real> window_scale;
  int diag_points = 8;  // per side
  int threads = 0;      // 0: SIXBIE_THREADS or hardware concurrency
};

/// C^∞ step: 1 for u ≤ u1, 0 for u ≥ u2.
real smooth_window(real u, real u1, real u2);

/// Interior-limit minus principal-value constants, rows (value, ∂/∂n,
/// ∂/∂n Δ²) × columns (w1, w2, w3), for the inward normal.
JumpTable analytic_jumps(const KernelContext& ctx);

/// The eight radial profiles (P0, P1, P3, P3star) × (m = 0, 2) feeding the
/// 3×3 trace block, evaluated from one set of Bessel values per distance.
class TraceBlock {
 public:
  explicit TraceBlock(const KernelContext& ctx);

  /// out[row*3 + col]: full trace kernels at distance r, e = (x − y)/r.
  void eval(real r, Vec2 e, Vec2 nx, Vec2 ny, cplx* out) const;
  /// Same operators applied to the −ln r coefficient functions.
  void eval_log(real r, Vec2 e, Vec2 nx, Vec2 ny, cplx* out) const;

  const KernelContext& context() const { return ctx_; }

 private:
  void combine(const std::array<RadialDerivs, 8>& d, real r, Vec2 e, Vec2 nx, Vec2 ny, cplx* out) const;
  KernelContext ctx_;
  std::array<RadialProfile, 8> prof_;  // index: kernel (P0, P1, P3, P3star) + 4·(m == 2)
};

class NystromAssembler {
 public:
  NystromAssembler(const KernelContext& ctx, const BoundaryCurve& curve, int n, NystromOptions opts = {});
  ~NystromAssembler();
  NystromAssembler(const NystromAssembler&) = delete;
  NystromAssembler& operator=(const NystromAssembler&) = delete;

  /// The upsampling factor the constructor would pick.
  static int choose_upsample(const KernelContext& ctx, const BoundaryCurve& curve, int n, const NystromOptions& opts);

  int n() const { return n_; }
  int fine_n() const { return nf_; }
  int upsample() const { return p_; }
  real window_scale() const { return wscale_; }
  const QuadratureNodes& nodes() const { return coarse_; }
  const QuadratureNodes& fine_nodes() const { return fine_; }
  const KernelContext& context() const { return block_.context(); }
  const BoundaryCurve& curve() const { return curve_; }
  const JumpTable& jumps() const { return jumps_; }

  /// 3n × 3n matrix of interior-limit traces at the coarse nodes (the
  /// principal-value operator plus the jump constants on the diagonal when
  /// include_jumps is set). Unknowns are ordered (μ1, μ2, μ3), each over the
  /// nodes; rows (value, ∂/∂n, ∂/∂n Δ²).
  CMatrix assemble(bool include_jumps = true) const;

  /// Rows for targets at fine-grid indices q (3 per target, ordered
  /// target-major by trace) acting on the coarse density.
  CMatrix trace_rows(const std::vector<int>& fine_targets, bool include_jumps = true) const;

  /// Trigonometric interpolation of each of the three density components
  /// from the coarse to the fine grid.
  CVector upsample_density(const CVector& coarse) const;

 private:
  void fine_row(int q, cplx* rows) const;           // 9 rows of length n_f
  void restrict_row(const cplx* fine, cplx* coarse, void* work) const;
  KernelContext ctx_;
  BoundaryCurve curve_;
  int n_, p_, nf_;
  NystromOptions opts_;
  real wscale_;
  QuadratureNodes coarse_, fine_;
  TraceBlock block_;
  JumpTable jumps_;
  std::vector<real> kress_;     // R(2π j/n_f), j = 0..n_f−1
  std::vector<real> lagrange_;  // weights for the coincident-node limit
  std::vector<real> offsets_;
  void* plan_fine_ = nullptr;
  void* plan_coarse_ = nullptr;
};

}  // namespace sixbie
