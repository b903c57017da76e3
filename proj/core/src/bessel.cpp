#include "sixbie/bessel.hpp"

#include <fmt/format.h>

#include <limits>

#include "sixbie/error.hpp"
#include "sixbie/quadrature.hpp"

namespace sixbie {

namespace {

constexpr real eps = std::numeric_limits<real>::epsilon();
constexpr real kSeriesRadius = 2.0;
constexpr real kAsymptoticRadius = 17.0;

void check_domain(cplx z) {
  if (!(z.real() > 0.0))
    throw Error(ErrorCode::DomainError, fmt::format("Re z = {} must be positive", z.real()));
  if (std::abs(z) < 1e-8)
    throw Error(ErrorCode::DomainError, fmt::format("|z| = {} below 1e-8", std::abs(z)));
}

struct Pair {
  cplx k0, k1;
  real err0, err1;
};

// K0 = −(ln(z/2) + γ) I0 + Σ_{k≥1} H_k y^k/(k!)²,
// K1 = 1/z + (ln(z/2) + γ) I1 − (z/4) Σ_{k≥0} (H_k + H_{k+1}) y^k/(k!(k+1)!),  y = z²/4.
Pair series(cplx z) {
  const cplx y = 0.25 * z * z;
  const cplx lg = std::log(0.5 * z) + euler_gamma;
  cplx t0{1.0, 0.0};  // y^k/(k!)²
  cplx t1{1.0, 0.0};  // y^k/(k!(k+1)!)
  cplx i0 = t0, s0{}, i1s = t1, s1 = t1;  // s1 accumulates (H_k + H_{k+1}) t1; H_0 + H_1 = 1
  real h = 0.0;
  real mag0 = 1.0, mag1 = 1.0;
  for (int k = 1; k < 60; ++k) {
    const real hp = h + 1.0 / k;
    t0 *= y / (real(k) * k);
    t1 *= y / (real(k) * (k + 1));
    i0 += t0;
    s0 += hp * t0;
    i1s += t1;
    const real hn = hp + 1.0 / (k + 1);
    s1 += (hp + hn) * t1;
    h = hp;
    mag0 += std::abs(t0) * (1.0 + hp);
    mag1 += std::abs(t1) * (1.0 + hp + hn);
    if (std::abs(t0) * (1.0 + hp) < 1e-18 * std::abs(i0) && std::abs(t1) * (hp + hn) < 1e-18 * std::abs(s1))
      break;
  }
  Pair p;
  p.k0 = -lg * i0 + s0;
  const cplx i1 = 0.5 * z * i1s;
  p.k1 = 1.0 / z + lg * i1 - 0.25 * z * s1;
  p.err0 = 4.0 * eps * (std::abs(lg) * mag0 + mag0);
  p.err1 = 4.0 * eps * (1.0 / std::abs(z) + std::abs(z) * (std::abs(lg) + 1.0) * mag1);
  return p;
}

// Temme's continued fraction (Steed's algorithm) for ν = 0, returning the
// scaled pair e^{z} K0, e^{z} K1.
Pair temme_scaled(cplx z) {
  cplx b = 2.0 * (1.0 + z);
  cplx d = 1.0 / b;
  cplx h = d, delh = d;
  cplx q1{}, q2{1.0, 0.0};
  const real a1 = 0.25;
  cplx q{a1}, c{a1};
  cplx a{-a1};
  cplx s = 1.0 + q * delh;
  int it = 2;
  for (; it < 20000; ++it) {
    a -= 2.0 * (it - 1);
    c = -a * c / real(it);
    const cplx qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const cplx dels = q * delh;
    s += dels;
    if (std::abs(dels) < eps * 0.5 * std::abs(s)) break;
  }
  if (it >= 20000) throw Error(ErrorCode::ConvergenceFailure, "Temme continued fraction did not converge");
  h = a1 * h;
  Pair p;
  p.k0 = std::sqrt(pi / (2.0 * z)) / s;
  p.k1 = p.k0 * (z + 0.5 - h) / z;
  p.err0 = 8.0 * eps * std::abs(p.k0);
  p.err1 = 8.0 * eps * std::abs(p.k1);
  return p;
}

// √(π/2z) Σ a_k(ν)/z^k with a_k = ∏_{j=1}^{k} (4ν² − (2j−1)²) / (k! 8^k); scaled by e^{z}.
Pair asymptotic_scaled(cplx z) {
  const cplx pref = std::sqrt(pi / (2.0 * z));
  Pair p{};
  for (int order = 0; order < 2; ++order) {
    const real mu = 4.0 * order * order;
    cplx term{1.0, 0.0}, sum{1.0, 0.0};
    real last = 1.0;
    for (int k = 1; k < 200; ++k) {
      const real odd = 2.0 * k - 1.0;
      term *= (mu - odd * odd) / (k * 8.0 * z);
      const real mag = std::abs(term);
      if (mag > last) break;  // past the smallest term
      sum += term;
      last = mag;
      if (mag < 0.25 * eps * std::abs(sum)) break;
    }
    const cplx v = pref * sum;
    const real err = std::abs(pref) * (last + 2.0 * eps * std::abs(sum));
    if (order == 0) {
      p.k0 = v;
      p.err0 = err;
    } else {
      p.k1 = v;
      p.err1 = err;
    }
  }
  return p;
}

Pair evaluate(cplx z, bool want_scaled) {
  const real m = std::abs(z);
  if (m <= kSeriesRadius) {
    Pair p = series(z);
    if (want_scaled) {
      const cplx e = std::exp(z);
      p.k0 *= e;
      p.k1 *= e;
      p.err0 *= std::abs(e);
      p.err1 *= std::abs(e);
    }
    return p;
  }
  Pair p = m < kAsymptoticRadius ? temme_scaled(z) : asymptotic_scaled(z);
  if (!want_scaled) {
    const cplx e = std::exp(-z);
    p.k0 *= e;
    p.k1 *= e;
    p.err0 *= std::abs(e);
    p.err1 *= std::abs(e);
  }
  return p;
}

}  // namespace

BesselValue bessel_k(int order, cplx z) {
  if (order != 0 && order != 1) throw Error(ErrorCode::InvalidArgument, "order must be 0 or 1");
  check_domain(z);
  const bool scaled = std::abs(z) > kBesselScaleThreshold;
  const Pair p = evaluate(z, scaled);
  return order == 0 ? BesselValue{p.k0, p.err0, scaled} : BesselValue{p.k1, p.err1, scaled};
}

BesselValue bessel_k_scaled(int order, cplx z) {
  if (order != 0 && order != 1) throw Error(ErrorCode::InvalidArgument, "order must be 0 or 1");
  check_domain(z);
  const Pair p = evaluate(z, true);
  return order == 0 ? BesselValue{p.k0, p.err0, true} : BesselValue{p.k1, p.err1, true};
}

void bessel_k01(cplx z, cplx& k0, cplx& k1) {
  check_domain(z);
  const Pair p = evaluate(z, false);
  k0 = p.k0;
  k1 = p.k1;
}

BesselValue bessel_k0_reference(cplx z, real target_error) {
  if (!(z.real() > 0.0))
    throw Error(ErrorCode::DomainError, fmt::format("Re z = {} must be positive", z.real()));
  const real mod = std::abs(z);
  const real phi = std::arg(z);
  const real sp = std::sin(phi), cp = std::cos(phi);

  // Steepest-descent path t = X + iY(X): Im(e^{iφ}(cosh t − 1)) = 0,
  // Y(0) = 0, Y'(0) = −tan(φ/2), Y(∞) = −φ.
  const real slope0 = -std::tan(0.5 * phi);
  auto path = [&](real X, real& Y, real& dY) {
    if (phi == 0.0) {
      Y = 0.0;
      dY = 0.0;
      return;
    }
    if (X == 0.0) {
      Y = 0.0;
      dY = slope0;
      return;
    }
    const real shX = std::sinh(X), chX = std::cosh(X);
    // F(0) and F(−φ) have opposite signs; bracketed Newton keeps Y inside.
    // cosh X cos Y − 1 = 2 sinh²(X/2) cos Y − 2 sin²(Y/2), free of cancellation.
    const real sh2 = 2.0 * std::sinh(0.5 * X) * std::sinh(0.5 * X);
    auto F = [&](real y) {
      const real s2 = std::sin(0.5 * y);
      return sp * (sh2 * std::cos(y) - 2.0 * s2 * s2) + cp * shX * std::sin(y);
    };
    real lo = std::min(0.0, -phi), hi = std::max(0.0, -phi);
    const real flo = F(lo);
    Y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const real fy = F(Y);
      if ((fy < 0.0) == (flo < 0.0)) lo = Y; else hi = Y;
      const real FY = -sp * chX * std::sin(Y) + cp * shX * std::cos(Y);
      real next = FY != 0.0 ? Y - fy / FY : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const real delta = next - Y;
      Y = next;
      if (std::abs(delta) < 1e-16 * (1.0 + std::abs(Y)) || hi - lo < 1e-16) break;
    }
    const real FX = sp * shX * std::cos(Y) + cp * chX * std::sin(Y);
    const real FY = -sp * chX * std::sin(Y) + cp * shX * std::cos(Y);
    dY = -FX / FY;
  };
  auto exponent = [&](real X, real Y) {
    // Re(e^{iφ}(cosh t − 1)) along the path (real and nonnegative)
    const real shh = std::sinh(0.5 * X), s2 = std::sin(0.5 * Y);
    return cp * (2.0 * shh * shh * std::cos(Y) - 2.0 * s2 * s2) - sp * std::sinh(X) * std::sin(Y);
  };
  // Truncate where |z|·g(X) exceeds 45 (integrand below e^{−45}).
  real xmax = 1.0;
  for (;;) {
    real Y, dY;
    path(xmax, Y, dY);
    if (mod * exponent(xmax, Y) > 45.0 || xmax > 60.0) break;
    xmax *= 1.25;
  }
  auto integrand = [&](real X) -> cplx {
    real Y, dY;
    path(X, Y, dY);
    return std::exp(-mod * exponent(X, Y)) * cplx(1.0, dY);
  };
  // The integrand peaks in a layer of width ~1/√|z| at the origin.
  const real split = std::min(xmax, 4.0 / std::sqrt(std::max(mod, 1e-3)));
  const QuadratureResult a = integrate_adaptive(integrand, 0.0, split, 0.0, 0.1 * target_error, 20000);
  const QuadratureResult b = integrate_adaptive(integrand, split, xmax, 0.1 * target_error * std::abs(a.value), 0.1 * target_error, 20000);
  if (!a.converged || !b.converged)
    throw Error(ErrorCode::ConvergenceFailure,
                fmt::format("reference K0({}, {}) did not reach {:.1e}", z.real(), z.imag(), target_error));
  const cplx e = std::exp(-z);
  const cplx total = a.value + b.value;
  return {e * total, std::abs(e) * (a.error + b.error + std::abs(total) * std::exp(-45.0)), false};
}

}  // namespace sixbie
