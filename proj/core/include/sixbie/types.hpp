#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace sixbie {

using real = double;
using cplx = std::complex<double>;

inline constexpr real pi = std::numbers::pi;
inline constexpr real euler_gamma = std::numbers::egamma;

/// Planar point or vector.
struct Vec2 {
  real x = 0.0;
  real y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(real s) const { return {x * s, y * s}; }
  constexpr real dot(Vec2 o) const { return x * o.x + y * o.y; }
  real norm() const { return std::hypot(x, y); }
};

inline constexpr Vec2 operator*(real s, Vec2 v) { return v * s; }

/// Complex planar vector, used for gradients of complex kernels.
struct CVec2 {
  cplx x{};
  cplx y{};

  CVec2 operator+(const CVec2& o) const { return {x + o.x, y + o.y}; }
  CVec2 operator*(cplx s) const { return {x * s, y * s}; }
  cplx dot(Vec2 v) const { return x * v.x + y * v.y; }
};

}  // namespace sixbie
