#include "sixbie/kernels.hpp"

#include <fmt/format.h>

#include "sixbie/bessel.hpp"
#include "sixbie/error.hpp"

namespace sixbie {

const char* to_string(KernelId id) {
  switch (id) {
    case KernelId::P0: return "P0";
    case KernelId::P1: return "P1";
    case KernelId::P2: return "P2";
    case KernelId::P3: return "P3";
    case KernelId::P3star: return "P3star";
  }
  return "?";
}

namespace {

void fill_kappa(KernelContext& ctx) {
  ctx.kappa_max = 0.0;
  for (int k = 0; k < 3; ++k) {
    ctx.kappa[k] = scaled_argument(ctx.lambda, ctx.roots, k, 1.0);
    ctx.kappa_max = std::max(ctx.kappa_max, std::abs(ctx.kappa[k]));
  }
  const cplx l = ctx.lambda.lambda;
  ctx.beta = 2.0 * ctx.coeffs.a0 / (3.0 * l * l);
}

}  // namespace

KernelContext KernelContext::make(const Coefficients& coeffs, const SpectralParameter& lambda,
                                  CubicTolerances tol) {
  const std::string why = sector_violation(lambda);
  if (!why.empty()) throw Error(ErrorCode::SectorConditionViolated, why);
  KernelContext ctx;
  ctx.coeffs = coeffs;
  ctx.roots = solve_characteristic_cubic(coeffs, tol);
  ctx.lambda = lambda;
  fill_kappa(ctx);
  return ctx;
}

KernelContext KernelContext::from_roots(const std::array<cplx, 3>& nu, const SpectralParameter& lambda) {
  KernelContext ctx;
  ctx.coeffs = Coefficients::from_roots(nu);
  ctx.roots = CharacteristicRoots::from_roots(nu);
  ctx.lambda = lambda;
  fill_kappa(ctx);
  return ctx;
}

std::array<cplx, 3> KernelContext::weights(KernelId id, int m) const {
  if (id == KernelId::P2) throw Error(ErrorCode::InvalidArgument, "P2 is not a radial kernel");
  const cplx l = lambda.lambda;
  const cplx l2 = l * l;
  const cplx pre = -1.0 / (4.0 * pi * l2 * l2);
  std::array<cplx, 3> c{};
  for (int k = 0; k < 3; ++k) {
    const cplx nu = roots.nu[k];
    cplx w;
    switch (id) {
      case KernelId::P0: w = nu; break;
      case KernelId::P1: w = nu * nu; break;
      case KernelId::P3: w = nu * nu - coeffs.a2 * nu; break;
      default: w = coeffs.a1 * nu - coeffs.a0; break;
    }
    cplx scale{1.0, 0.0};
    const cplx k2 = kappa[k] * kappa[k];
    for (int j = 0; j < m; ++j) scale *= k2;
    c[k] = pre * w / roots.denoms[k] * scale;
  }
  return c;
}

RadialProfile::RadialProfile(const std::array<cplx, 3>& c, const std::array<cplx, 3>& kappa)
    : c_(c), kappa_(kappa) {
  for (const cplx& k : kappa_) kmax_ = std::max(kmax_, std::abs(k));
  std::array<cplx, 3> t = c_, lg{};
  std::array<cplx, 3> y{};
  for (int k = 0; k < 3; ++k) {
    y[k] = 0.25 * kappa_[k] * kappa_[k];
    lg[k] = std::log(0.5 * kappa_[k]) + euler_gamma;
  }
  real h = 0.0;
  for (int j = 0; j < kTerms; ++j) {
    if (j > 0) {
      h += 1.0 / j;
      for (int k = 0; k < 3; ++k) t[k] *= y[k] / (real(j) * j);
    }
    cplx a{}, b{};
    for (int k = 0; k < 3; ++k) {
      a += t[k];
      b += t[k] * (h - lg[k]);
    }
    alpha_[j] = a;
    beta_[j] = b;
  }
}

RadialDerivs RadialProfile::eval(real r) const {
  if (kmax_ * r <= kSeriesLimit) return eval_series(r);
  std::array<cplx, 3> k0{}, k1{};
  for (int k = 0; k < 3; ++k) bessel_k01(kappa_[k] * r, k0[k], k1[k]);
  return eval_bessel(r, k0, k1);
}

RadialDerivs RadialProfile::eval_bessel(real r, const std::array<cplx, 3>& k0,
                                        const std::array<cplx, 3>& k1) const {
  RadialDerivs d;
  for (int k = 0; k < 3; ++k) {
    const cplx kk = kappa_[k];
    const cplx z = kk * r;
    const cplx ck = c_[k];
    d.f += ck * k0[k];
    d.f1 -= ck * kk * k1[k];
    d.f2 += ck * kk * kk * (k0[k] + k1[k] / z);
    d.f3 += ck * kk * kk * kk * (-k1[k] - k0[k] / z - 2.0 * k1[k] / (z * z));
  }
  d.q = d.f1 / r;
  d.qp = d.f2 / r - d.f1 / (r * r);
  return d;
}

RadialDerivs RadialProfile::eval_series(real r) const {
  // Term j contributes r^m g with m = 2j, g = −α ln r + β, g′ = −α/r.
  const real lr = std::log(r);
  const real r2 = r * r;
  const real ir = 1.0 / r;
  RadialDerivs d;
  real pm = ir * ir * ir;  // r^{m−3}
  // max|κ| r ≤ 2 bounds term j by 1/(j!)², negligible past j = 15.
  for (int j = 0; j < 16; ++j) {
    const real m = 2.0 * j;
    const cplx A = alpha_[j];
    const cplx g = -A * lr + beta_[j];
    const real p3 = pm, p2 = pm * r, p1 = p2 * r, p0 = p1 * r;
    d.f += p0 * g;
    d.f1 += m * p1 * g - A * p1;
    d.f2 += m * (m - 1.0) * p2 * g - (2.0 * m - 1.0) * A * p2;
    d.f3 += m * (m - 1.0) * (m - 2.0) * p3 * g - m * (m - 1.0) * A * p3 - (2.0 * m - 1.0) * (m - 2.0) * A * p3;
    d.q += m * p2 * g - A * p2;
    d.qp += m * (m - 2.0) * p3 * g - m * A * p3 - (m - 2.0) * A * p3;
    pm *= r2;
  }
  return d;
}

RadialDerivs RadialProfile::eval_log_part(real r) const {
  RadialDerivs d;
  const real r2 = r * r;
  real pm = 1.0 / (r * r2);  // r^{m−3}
  // |α_j| r^{2j} ≤ Σ|c_k| b_j with b_j = (u/2)^{2j}/(j!)², u = max|κ| r.
  const real y = 0.25 * kmax_ * kmax_ * r2;
  real b = 1.0, bmax = 1.0;
  for (int j = 0; j < kTerms; ++j) {
    const real m = 2.0 * j;
    if (j > 0) {
      b *= y / (real(j) * j);
      bmax = std::max(bmax, b);
      if (j > 2 && real(j) * j > y && b * (m + 1.0) * (m + 1.0) * (m + 1.0) < 1e-18 * bmax) break;
    }
    const cplx A = alpha_[j];
    const real p3 = pm, p2 = pm * r, p1 = p2 * r, p0 = p1 * r;
    d.f += A * p0;
    if (j >= 1) {
      d.f1 += m * A * p1;
      d.f2 += m * (m - 1.0) * A * p2;
      d.q += m * A * p2;
    }
    if (j >= 2) {
      d.f3 += m * (m - 1.0) * (m - 2.0) * A * p3;
      d.qp += m * (m - 2.0) * A * p3;
    }
    pm *= r2;
  }
  return d;
}

namespace trace {

cplx value(const RadialDerivs& d) { return d.f; }

cplx normal(const RadialDerivs& d, Vec2 e, Vec2 nx) { return d.f1 * e.dot(nx); }

CVec2 gradient(const RadialDerivs& d, Vec2 e) { return {d.f1 * e.x, d.f1 * e.y}; }

cplx hess_nn(const RadialDerivs& d, Vec2 e, Vec2 ny) {
  const real c = e.dot(ny);
  return d.f2 * (c * c) + d.q * (1.0 - c * c);
}

cplx normal_hess_nn(const RadialDerivs& d, Vec2 e, Vec2 nx, Vec2 ny, real r) {
  const real cx = e.dot(nx), cy = e.dot(ny), nn = nx.dot(ny);
  return d.f3 * (cx * cy * cy) + d.qp * (cx * (1.0 - cy * cy)) + 2.0 * cy * (d.f2 - d.q) * ((nn - cx * cy) / r);
}

CVec2 gradient_hess_nn(const RadialDerivs& d, Vec2 e, Vec2 ny, real r) {
  const real c = e.dot(ny);
  const cplx radial = d.f3 * (c * c) + d.qp * (1.0 - c * c);
  const cplx tang = 2.0 * c * (d.f2 - d.q) / r;
  const Vec2 t = ny - e * c;
  return {radial * e.x + tang * t.x, radial * e.y + tang * t.y};
}

}  // namespace trace

namespace {

struct Point {
  real r;
  Vec2 e;
};

Point split(Vec2 dx) {
  const real r = dx.norm();
  if (!(r > 0.0)) throw Error(ErrorCode::SingularPoint, "kernel evaluated at r = 0");
  return {r, dx * (1.0 / r)};
}

Vec2 need_normal(KernelId id, const std::optional<Vec2>& n_y) {
  if (id == KernelId::P2 && !n_y) throw Error(ErrorCode::MissingNormal, "P2 requires the source normal n_y");
  return n_y.value_or(Vec2{});
}

RadialDerivs derivs(KernelId id, int m, const KernelContext& ctx, real r) {
  return RadialProfile(ctx.weights(id, m), ctx.kappa).eval(r);
}

}  // namespace

cplx eval_kernel_laplacian_power(KernelId id, int m, const KernelContext& ctx, Vec2 dx, std::optional<Vec2> n_y) {
  if (m < 0 || m > 3) throw Error(ErrorCode::InvalidArgument, fmt::format("Laplacian power {} not in 0..3", m));
  const Vec2 ny = need_normal(id, n_y);
  const Point p = split(dx);
  if (id != KernelId::P2) return trace::value(derivs(id, m, ctx, p.r));
  return trace::value(derivs(KernelId::P3, m, ctx, p.r)) -
         ctx.beta * trace::hess_nn(derivs(KernelId::P3star, m, ctx, p.r), p.e, ny);
}

real annihilation_residual(KernelId id, const KernelContext& ctx, Vec2 dx, std::optional<Vec2> n_y) {
  const cplx lam = ctx.lambda.lambda;
  const cplx lam2 = lam * lam;
  const cplx terms[4] = {ctx.coeffs.a0 * eval_kernel_laplacian_power(id, 3, ctx, dx, n_y),
                         ctx.coeffs.a1 * lam2 * eval_kernel_laplacian_power(id, 2, ctx, dx, n_y),
                         ctx.coeffs.a2 * lam2 * lam2 * eval_kernel_laplacian_power(id, 1, ctx, dx, n_y),
                         lam2 * lam2 * lam2 * eval_kernel_laplacian_power(id, 0, ctx, dx, n_y)};
  cplx sum = 0.0;
  real scale = 0.0;
  for (const cplx& t : terms) {
    sum += t;
    scale += std::abs(t);
  }
  return scale == 0.0 ? 0.0 : std::abs(sum) / scale;
}

cplx eval_kernel(KernelId id, const KernelContext& ctx, Vec2 dx, std::optional<Vec2> n_y) {
  return eval_kernel_laplacian_power(id, 0, ctx, dx, n_y);
}

CVec2 eval_kernel_gradient_laplacian_power(KernelId id, int m, const KernelContext& ctx, Vec2 dx,
                                           std::optional<Vec2> n_y) {
  if (m < 0 || m > 3) throw Error(ErrorCode::InvalidArgument, fmt::format("Laplacian power {} not in 0..3", m));
  const Vec2 ny = need_normal(id, n_y);
  const Point p = split(dx);
  if (id != KernelId::P2) return trace::gradient(derivs(id, m, ctx, p.r), p.e);
  const CVec2 g = trace::gradient(derivs(KernelId::P3, m, ctx, p.r), p.e);
  const CVec2 h = trace::gradient_hess_nn(derivs(KernelId::P3star, m, ctx, p.r), p.e, ny, p.r);
  return {g.x - ctx.beta * h.x, g.y - ctx.beta * h.y};
}

CVec2 eval_kernel_gradient(KernelId id, const KernelContext& ctx, Vec2 dx, std::optional<Vec2> n_y) {
  return eval_kernel_gradient_laplacian_power(id, 0, ctx, dx, n_y);
}

cplx second_normal_derivative(KernelId id, const KernelContext& ctx, Vec2 dx, Vec2 n_y) {
  if (id != KernelId::P3star)
    throw Error(ErrorCode::InvalidArgument, "second_normal_derivative is defined for P3star only");
  const Point p = split(dx);
  return trace::hess_nn(derivs(KernelId::P3star, 0, ctx, p.r), p.e, n_y);
}

}  // namespace sixbie
