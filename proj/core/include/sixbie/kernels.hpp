#pragma once

// Fundamental and particular solutions of the sixth-order operator,
//   P(r) = −1/(4πλ⁴) Σ_k w_k/d_k K0(κ_k r),  κ_k = λ/√(−ν_k),
// with numerator weights w_k = ν_k (P0), ν_k² (P1), ν_k² − A2 ν_k (P3) and
// A1 ν_k − A0 (P3star). P2 = P3 − β ∂²/∂n_y² P3star with β = 2A0/(3λ²).

#include <array>
#include <optional>
#include <vector>

#include "sixbie/spectral.hpp"
#include "sixbie/types.hpp"

namespace sixbie {

enum class KernelId { P0, P1, P2, P3, P3star };

const char* to_string(KernelId id);

struct KernelContext {
  Coefficients coeffs;
  CharacteristicRoots roots;
  SpectralParameter lambda;
  std::array<cplx, 3> kappa{};  // λ/√(−ν_k), Re κ_k > 0
  cplx beta{};                  // 2 A0/(3 λ²)
  real kappa_max = 0.0;         // max_k |κ_k|

  /// Solves the cubic and checks sector membership (SectorConditionViolated).
  static KernelContext make(const Coefficients& coeffs, const SpectralParameter& lambda,
                            CubicTolerances tol = {});

  /// Skips the root-sign condition and the sector test, but still requires
  /// Re κ_k > 0. For synthetic root sets in verification.
  static KernelContext from_roots(const std::array<cplx, 3>& nu, const SpectralParameter& lambda);

  /// Coefficients c_k of K0(κ_k r) in Δᵐ P_id. id must be radial (not P2).
  std::array<cplx, 3> weights(KernelId id, int m = 0) const;
};

/// f and its radial derivatives. q = f′/r and qp = (f′/r)′ stay accurate as
/// r → 0, where they carry the cancellations that keep the kernels weakly
/// singular.
struct RadialDerivs {
  cplx f{}, f1{}, f2{}, f3{}, q{}, qp{};
};

/// f(r) = Σ_k c_k K0(κ_k r), stored both as Bessel sums and as the expansion
///   f(r) = Σ_j r^{2j} (−α_j ln r + β_j),
/// which is used whenever max|κ| r ≤ 2.
class RadialProfile {
 public:
  static constexpr int kTerms = 40;
  static constexpr real kSeriesLimit = 2.0;

  RadialProfile() = default;
  RadialProfile(const std::array<cplx, 3>& c, const std::array<cplx, 3>& kappa);

  RadialDerivs eval(real r) const;
  /// Bessel path with K0(κ_k r), K1(κ_k r) supplied by the caller.
  RadialDerivs eval_bessel(real r, const std::array<cplx, 3>& k0, const std::array<cplx, 3>& k1) const;
  RadialDerivs eval_series(real r) const;
  /// Derivatives of A(r) = Σ_j α_j r^{2j}, the coefficient of −ln r in f.
  RadialDerivs eval_log_part(real r) const;

  /// −α0: coefficient of ln r in f as r → 0.
  cplx log_coefficient() const { return -alpha_[0]; }
  /// −α1: coefficient of r² ln r.
  cplx r2log_coefficient() const { return -alpha_[1]; }
  const std::array<cplx, 3>& kappa() const { return kappa_; }
  real kappa_max() const { return kmax_; }

 private:
  std::array<cplx, 3> c_{}, kappa_{};
  std::array<cplx, kTerms> alpha_{}, beta_{};
  real kmax_ = 0.0;
};

/// Trace operators applied to a radial profile f(|x − y|); e = (x − y)/r.
namespace trace {
cplx value(const RadialDerivs& d);
/// ∂/∂n_x f
cplx normal(const RadialDerivs& d, Vec2 e, Vec2 nx);
CVec2 gradient(const RadialDerivs& d, Vec2 e);
/// n_yᵀ H n_y, H the Hessian of f
cplx hess_nn(const RadialDerivs& d, Vec2 e, Vec2 ny);
/// ∂/∂n_x of n_yᵀ H n_y
cplx normal_hess_nn(const RadialDerivs& d, Vec2 e, Vec2 nx, Vec2 ny, real r);
CVec2 gradient_hess_nn(const RadialDerivs& d, Vec2 e, Vec2 ny, real r);
}  // namespace trace

/// P_id(x − y). Throws SingularPoint for dx = 0 and MissingNormal for P2
/// without n_y.
cplx eval_kernel(KernelId id, const KernelContext& ctx, Vec2 dx, std::optional<Vec2> n_y = std::nullopt);

/// |A0Δ³P + A1λ²Δ²P + A2λ⁴ΔP + λ⁶P| divided by the sum of the four term
/// magnitudes; zero up to roundoff for every kernel and r > 0.
real annihilation_residual(KernelId id, const KernelContext& ctx, Vec2 dx,
                           std::optional<Vec2> n_y = std::nullopt);

/// ∇_x P_id(x − y).
CVec2 eval_kernel_gradient(KernelId id, const KernelContext& ctx, Vec2 dx,
                           std::optional<Vec2> n_y = std::nullopt);

/// Δᵐ P_id, m ∈ 0..3, by κ_k^{2m} weighting of each term.
cplx eval_kernel_laplacian_power(KernelId id, int m, const KernelContext& ctx, Vec2 dx,
                                 std::optional<Vec2> n_y = std::nullopt);

/// ∂x_k Δᵐ P_id as a gradient vector.
CVec2 eval_kernel_gradient_laplacian_power(KernelId id, int m, const KernelContext& ctx, Vec2 dx,
                                           std::optional<Vec2> n_y = std::nullopt);

/// n_yᵀ H n_y for P3star, H the Hessian in y.
cplx second_normal_derivative(KernelId id, const KernelContext& ctx, Vec2 dx, Vec2 n_y);

/// Envelope fit of |∂x_k Δᵐ P| ≤ C e^{−ε|λ|r} / (|λ|^{4−2m} r).
struct DecayFit {
  real c = 0.0;
  real eps = 0.0;
  /// min over the grid of ln(RHS) − ln(LHS)
  real margin = 0.0;
  /// floor below which the fit is rejected
  real eps_min = 0.0;
};

/// ε is the slope of the upper convex envelope of ln(LHS·|λ|^{4−2m} r)
/// against u = |λ| r at its large-u end; C is the smallest constant
/// compatible with that ε over the whole grid. Throws BoundViolated when
/// ε ≤ ε_min, taken as half the smallest Re κ_k/|λ| over the family.
DecayFit verify_decay_bound(KernelId id, int m, const std::vector<KernelContext>& family,
                            const std::vector<real>& r_grid);

/// Convenience overload building the contexts from a coefficient set.
DecayFit verify_decay_bound(KernelId id, int m, const Coefficients& coeffs,
                            const std::vector<SpectralParameter>& family, const std::vector<real>& r_grid);

}  // namespace sixbie
