#include <gtest/gtest.h>

#include "sixbie/bessel.hpp"
#include "sixbie/error.hpp"
#include "sixbie/kernels.hpp"

using namespace sixbie;

namespace {

const Coefficients kCoeffs{cplx(0, 2), cplx(2, -3), cplx(-3, 1)};
constexpr KernelId kRadial[] = {KernelId::P0, KernelId::P1, KernelId::P3, KernelId::P3star};
constexpr KernelId kAll[] = {KernelId::P0, KernelId::P1, KernelId::P2, KernelId::P3, KernelId::P3star};
const Vec2 kNormal{std::cos(1.1), std::sin(1.1)};

KernelContext ctx_at(cplx lam) { return KernelContext::make(kCoeffs, {lam, {}}); }

real rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Direct evaluation of the defining sum with the quadrature oracle for K0.
cplx oracle(KernelId id, const KernelContext& c, real r) {
  const auto& nu = c.roots.nu;
  const cplx l4 = std::pow(c.lambda.lambda, 4);
  cplx s = 0.0;
  for (int k = 0; k < 3; ++k) {
    cplx w;
    switch (id) {
      case KernelId::P0: w = nu[k]; break;
      case KernelId::P1: w = nu[k] * nu[k]; break;
      case KernelId::P3: w = nu[k] * nu[k] - c.coeffs.a2 * nu[k]; break;
      default: w = c.coeffs.a1 * nu[k] - c.coeffs.a0; break;
    }
    s += w / c.roots.denoms[k] * bessel_k0_reference(c.kappa[k] * r).value;
  }
  return -s / (4.0 * pi * l4);
}

// Least-squares slope of f against ln(1/r) on a log grid.
cplx log_slope(const std::function<cplx(real)>& f, real r0, real r1, int n = 9) {
  real sx = 0, sxx = 0;
  cplx sy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const real r = r0 * std::pow(r1 / r0, real(i) / (n - 1));
    const real x = -std::log(r);
    const cplx y = f(r);
    sx += x;
    sxx += x * x;
    sy += y;
    sxy += x * y;
  }
  return (real(n) * sxy - sx * sy) / (real(n) * sxx - sx * sx);
}

std::vector<cplx> sector_lambdas() {
  const real lo = -pi / 4 + pi / 16, hi = pi / 4 - 1e-3;
  return {std::polar(8.0, lo), 16.0, std::polar(20.0, 0.5), std::polar(32.0, -0.3), std::polar(64.0, hi)};
}

}  // namespace

TEST(Kernels, MatchDirectBesselSum) {
  for (const cplx& lam : {cplx(4.0), cplx(16.0), std::polar(10.0, 0.6)}) {
    const KernelContext c = ctx_at(lam);
    for (real r : {0.05, 0.1, 0.5, 1.0, 2.0})
      for (KernelId id : kRadial) {
        const cplx ref = oracle(id, c, r);
        EXPECT_LT(rel(eval_kernel(id, c, {r, 0.0}), ref), 1e-12) << to_string(id) << " r=" << r << " lam=" << lam;
      }
  }
}

TEST(Kernels, RadialSymmetry) {
  const KernelContext c = ctx_at(16.0);
  for (KernelId id : kRadial) EXPECT_EQ(eval_kernel(id, c, {0.3, -0.7}), eval_kernel(id, c, {-0.3, 0.7}));
}

TEST(Kernels, P0BoundedAtOrigin) {
  const KernelContext c = ctx_at(16.0);
  const cplx a = eval_kernel(KernelId::P0, c, {1e-6, 0}), b = eval_kernel(KernelId::P0, c, {1e-7, 0});
  EXPECT_LE(std::abs(a - b), 1e-4 * std::abs(a));
}

TEST(Kernels, P1LogarithmicLimit) {
  const cplx lam = 16.0;
  const KernelContext c = ctx_at(lam);
  const cplx l4 = std::pow(lam, 4);
  // P1 behaves like +ln(r)/(4πλ⁴); the difference has a finite limit.
  auto g = [&](real r) { return eval_kernel(KernelId::P1, c, {r, 0}) - std::log(r) / (4.0 * pi * l4); };
  const cplx g4 = g(1e-4), g5 = g(1e-5), g6 = g(1e-6);
  EXPECT_LE(std::abs(g5 - g6), 1e-6 * std::abs(g6));
  EXPECT_LE(std::abs(g4 - g5), 1e-4 * std::abs(g6));
  auto plus = [&](real r) { return eval_kernel(KernelId::P1, c, {r, 0}) + std::log(r) / (4.0 * pi * l4); };
  EXPECT_GT(std::abs(plus(1e-6) - plus(1e-4)), 0.9 * 2.0 * std::log(100.0) / (4.0 * pi * std::abs(l4)));
}

TEST(Kernels, LogCoefficientTable) {
  const cplx lam = std::polar(16.0, 0.2);
  const KernelContext c = ctx_at(lam);
  const cplx unit = -1.0 / (4.0 * pi * std::pow(lam, 4));
  const cplx expect[4] = {0.0, unit, unit, 0.0};
  for (int i = 0; i < 4; ++i) {
    const KernelId id = kRadial[i];
    const cplx s = log_slope([&](real r) { return eval_kernel(id, c, {r, 0}); }, 1e-7, 1e-5);
    EXPECT_LT(std::abs(s - expect[i]), 1e-6 * std::abs(unit)) << to_string(id);
    EXPECT_LT(std::abs(RadialProfile(c.weights(id), c.kappa).log_coefficient() + expect[i]), 1e-12 * std::abs(unit));
  }
}

TEST(Kernels, LaplacianSquaredP0LogCoefficient) {
  const KernelContext c = ctx_at(16.0);
  const cplx s = log_slope([&](real r) { return eval_kernel_laplacian_power(KernelId::P0, 2, c, {r, 0}); }, 1e-5, 1e-3);
  EXPECT_LT(rel(s, -1.0 / (4.0 * pi * kCoeffs.a0)), 2e-3);
}

TEST(Kernels, GradientMatchesFiniteDifferences) {
  const KernelContext c = ctx_at(std::polar(4.0, 0.3));
  const Vec2 dx{1.0, 0.5};
  const real h = 1e-5;
  for (KernelId id : kAll) {
    const CVec2 g = eval_kernel_gradient(id, c, dx, kNormal);
    const cplx gx = (eval_kernel(id, c, dx + Vec2{h, 0}, kNormal) - eval_kernel(id, c, dx - Vec2{h, 0}, kNormal)) / (2 * h);
    const cplx gy = (eval_kernel(id, c, dx + Vec2{0, h}, kNormal) - eval_kernel(id, c, dx - Vec2{0, h}, kNormal)) / (2 * h);
    const real scale = std::hypot(std::abs(g.x), std::abs(g.y));
    EXPECT_LE(std::hypot(std::abs(g.x - gx), std::abs(g.y - gy)), 1e-7 * scale) << to_string(id);
  }
}

TEST(Kernels, RadialGradientParallelToOffset) {
  const KernelContext c = ctx_at(16.0);
  const Vec2 dx{0.3, -0.2};
  for (KernelId id : kRadial) {
    const CVec2 g = eval_kernel_gradient(id, c, dx);
    EXPECT_LE(std::abs(g.x * dx.y - g.y * dx.x), 1e-14 * std::abs(g.x) * dx.norm()) << to_string(id);
  }
}

TEST(Kernels, P1GradientBlowsUpLikeInverseRadius) {
  const cplx lam = 16.0;
  const KernelContext c = ctx_at(lam);
  for (real r : {1e-5, 1e-6}) {
    const CVec2 g = eval_kernel_gradient(KernelId::P1, c, {r, 0});
    EXPECT_NEAR(std::abs(g.x) * 4.0 * pi * std::pow(std::abs(lam), 4) * r, 1.0, 1e-3);
  }
}

TEST(Kernels, ZeroPowerIsTheKernel) {
  const KernelContext c = ctx_at(std::polar(12.0, -0.4));
  for (KernelId id : kAll)
    EXPECT_EQ(eval_kernel_laplacian_power(id, 0, c, {0.4, 0.3}, kNormal), eval_kernel(id, c, {0.4, 0.3}, kNormal));
}

TEST(Kernels, OperatorAnnihilation) {
  for (const cplx& lam : sector_lambdas()) {
    const KernelContext c = ctx_at(lam);
    for (int i = 0; i < 20; ++i) {
      const real r = 0.1 + (5.0 - 0.1) * i / 19;
      const Vec2 dx{r * std::cos(0.3), r * std::sin(0.3)};
      for (KernelId id : kAll) EXPECT_LE(annihilation_residual(id, c, dx, kNormal), 1e-10) << to_string(id) << " r=" << r;
    }
  }
}

TEST(Kernels, P3IsP1MinusA2P0) {
  const KernelContext c = ctx_at(16.0);
  for (real r : {0.01, 0.3, 1.5}) {
    const cplx p3 = eval_kernel(KernelId::P3, c, {r, 0});
    const cplx alt = eval_kernel(KernelId::P1, c, {r, 0}) - kCoeffs.a2 * eval_kernel(KernelId::P0, c, {r, 0});
    EXPECT_LT(rel(p3, alt), 1e-12);
  }
}

TEST(Kernels, SecondNormalDerivativeMatchesFiniteDifferences) {
  const KernelContext c = ctx_at(2.0);
  const Vec2 dx{0.8, 0.6};
  const real h = 1e-4;
  for (real th : {0.0, 0.7, 2.0}) {
    const Vec2 n{std::cos(th), std::sin(th)};
    // y ↦ P(x − y) along y + s n.
    auto p = [&](real s) { return eval_kernel(KernelId::P3star, c, dx - n * s); };
    const cplx fd = (p(h) - 2.0 * p(0) + p(-h)) / (h * h);
    EXPECT_LT(rel(second_normal_derivative(KernelId::P3star, c, dx, n), fd), 1e-6) << th;
  }
}

TEST(Kernels, HessianTraceIsLaplacian) {
  const KernelContext c = ctx_at(std::polar(16.0, 0.1));
  const Vec2 dx{0.3, 0.4};
  const Vec2 e = dx * (1.0 / dx.norm()), t{-e.y, e.x};
  const cplx tr = second_normal_derivative(KernelId::P3star, c, dx, e) + second_normal_derivative(KernelId::P3star, c, dx, t);
  EXPECT_LT(rel(tr, eval_kernel_laplacian_power(KernelId::P3star, 1, c, dx)), 1e-12);
}

TEST(Kernels, SecondNormalDerivativeOnlyLogSingular) {
  const KernelContext c = ctx_at(16.0);
  const Vec2 n{0.6, 0.8};
  auto s = [&](real r) { return std::abs(second_normal_derivative(KernelId::P3star, c, Vec2{0.6, 0.8} * r, n)); };
  // A 1/r² part would grow by 1e6 between these radii.
  EXPECT_LT(s(1e-6) / s(1e-3), 3.0);
  EXPECT_GT(s(1e-6) / s(1e-3), 1.2);
}

TEST(Kernels, ConjugationForRealCoefficients) {
  const std::array<cplx, 3> nu{cplx(0, 0.5), cplx(0, -0.5), cplx(-2, 0)};
  const Coefficients co = Coefficients::from_roots(nu);
  ASSERT_LT(std::abs(co.a0.imag()) + std::abs(co.a1.imag()) + std::abs(co.a2.imag()), 1e-15);
  const cplx lam = std::polar(10.0, 0.1);
  const KernelContext a = KernelContext::from_roots(nu, {lam, {}}), b = KernelContext::from_roots(nu, {std::conj(lam), {}});
  for (KernelId id : kAll) {
    const cplx pa = eval_kernel(id, a, {0.7, 0.2}, kNormal), pb = eval_kernel(id, b, {0.7, 0.2}, kNormal);
    EXPECT_LT(std::abs(pb - std::conj(pa)), 1e-13 * std::abs(pa)) << to_string(id);
  }
  const KernelContext r = KernelContext::from_roots(nu, {10.0, {}});
  for (KernelId id : kAll) {
    const cplx p = eval_kernel(id, r, {0.7, 0.2}, kNormal);
    EXPECT_LT(std::abs(p.imag()), 1e-13 * std::abs(p)) << to_string(id);
  }
}

TEST(Kernels, Guards) {
  const KernelContext c = ctx_at(16.0);
  auto code = [](const std::function<void()>& f) -> std::optional<ErrorCode> {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return std::nullopt;
  };
  EXPECT_EQ(code([&] { eval_kernel(KernelId::P0, c, {0, 0}); }), ErrorCode::SingularPoint);
  EXPECT_EQ(code([&] { eval_kernel(KernelId::P2, c, {1, 0}); }), ErrorCode::MissingNormal);
  EXPECT_EQ(code([&] { eval_kernel_laplacian_power(KernelId::P0, 4, c, {1, 0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code([&] { second_normal_derivative(KernelId::P0, c, {1, 0}, {1, 0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code([&] { KernelContext::make(kCoeffs, {cplx(0, 16), {}}); }), ErrorCode::SectorConditionViolated);
}
