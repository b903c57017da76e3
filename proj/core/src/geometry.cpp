#include "sixbie/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

#include "sixbie/error.hpp"

namespace sixbie {

const char* to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::circle: return "circle";
    case CurveKind::ellipse: return "ellipse";
    case CurveKind::smooth_star: return "smooth_star";
  }
  return "?";
}

CurveKind curve_kind_from_string(const std::string& s) {
  if (s == "circle") return CurveKind::circle;
  if (s == "ellipse") return CurveKind::ellipse;
  if (s == "smooth_star") return CurveKind::smooth_star;
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown curve kind '{}'", s));
}

BoundaryCurve::BoundaryCurve(CurveKind kind, CurveParams params) : kind_(kind), params_(std::move(params)) {}

Vec2 BoundaryCurve::position(real t) const {
  const real c = std::cos(t), s = std::sin(t);
  switch (kind_) {
    case CurveKind::circle: return params_.center + Vec2{params_.radius * c, params_.radius * s};
    case CurveKind::ellipse: return params_.center + Vec2{params_.a * c, params_.b * s};
    case CurveKind::smooth_star: {
      real rho = 1.0;
      for (auto [k, amp] : params_.harmonics) rho += amp * std::cos(k * t);
      rho *= params_.radius;
      return params_.center + Vec2{rho * c, rho * s};
    }
  }
  return {};
}

Vec2 BoundaryCurve::velocity(real t) const {
  const real c = std::cos(t), s = std::sin(t);
  switch (kind_) {
    case CurveKind::circle: return {-params_.radius * s, params_.radius * c};
    case CurveKind::ellipse: return {-params_.a * s, params_.b * c};
    case CurveKind::smooth_star: {
      real rho = 1.0, drho = 0.0;
      for (auto [k, amp] : params_.harmonics) {
        rho += amp * std::cos(k * t);
        drho -= amp * k * std::sin(k * t);
      }
      rho *= params_.radius;
      drho *= params_.radius;
      return {drho * c - rho * s, drho * s + rho * c};
    }
  }
  return {};
}

Vec2 BoundaryCurve::inward_normal(real t) const {
  const Vec2 v = velocity(t);
  const real sp = v.norm();
  return {-v.y / sp, v.x / sp};
}

namespace {

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  auto cross = [](Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; };
  const real d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const real d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

BoundaryCurve make_curve(CurveKind kind, const CurveParams& params) {
  switch (kind) {
    case CurveKind::circle:
      if (!(params.radius > 0.0)) throw Error(ErrorCode::IrregularCurve, "circle radius must be positive");
      break;
    case CurveKind::ellipse:
      if (!(params.a > 0.0 && params.b > 0.0)) throw Error(ErrorCode::IrregularCurve, "ellipse semi-axes must be positive");
      break;
    case CurveKind::smooth_star: {
      if (!(params.radius > 0.0)) throw Error(ErrorCode::IrregularCurve, "star radius must be positive");
      for (auto [k, amp] : params.harmonics)
        if (k < 1) throw Error(ErrorCode::IrregularCurve, fmt::format("star harmonic {} must be ≥ 1", k));
      break;
    }
  }
  BoundaryCurve curve(kind, params);

  constexpr int kSample = 2048;
  std::vector<Vec2> pts(kSample);
  real vmin = std::numeric_limits<real>::infinity(), vsum = 0.0, area2 = 0.0;
  for (int j = 0; j < kSample; ++j) {
    const real t = 2.0 * pi * j / kSample;
    pts[j] = curve.position(t);
    const real sp = curve.speed(t);
    vmin = std::min(vmin, sp);
    vsum += sp;
  }
  curve.mean_speed_ = vsum / kSample;
  curve.v_min_ = params.v_min_fraction * curve.mean_speed_;
  if (vmin < curve.v_min_)
    throw Error(ErrorCode::IrregularCurve,
                fmt::format("speed dips to {:.3g}, below v_min = {:.3g}", vmin, curve.v_min_));
  if (kind == CurveKind::smooth_star) {
    for (int j = 0; j < kSample; ++j) {
      const Vec2 d = pts[j] - params.center;
      if (d.norm() <= 0.0) throw Error(ErrorCode::IrregularCurve, "star radius function reaches zero");
    }
  }
  for (int j = 0; j < kSample; ++j) {
    const Vec2 p = pts[j], q = pts[(j + 1) % kSample];
    area2 += p.x * q.y - p.y * q.x;
  }
  if (!(area2 > 0.0)) throw Error(ErrorCode::IrregularCurve, "curve is not counter-clockwise");

  // Simplicity on a coarser polygon: non-adjacent edges must not cross.
  constexpr int kPoly = 512;
  std::vector<Vec2> poly(kPoly);
  for (int j = 0; j < kPoly; ++j) poly[j] = pts[j * (kSample / kPoly)];
  for (int i = 0; i < kPoly; ++i)
    for (int j = i + 2; j < kPoly; ++j) {
      if (i == 0 && j == kPoly - 1) continue;
      if (segments_cross(poly[i], poly[(i + 1) % kPoly], poly[j], poly[(j + 1) % kPoly]))
        throw Error(ErrorCode::SelfIntersection, fmt::format("edges {} and {} cross", i, j));
    }
  return curve;
}

real QuadratureNodes::length() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

QuadratureNodes sample_nodes(const BoundaryCurve& curve, int n) {
  if (n < 8 || n % 2 != 0) throw Error(ErrorCode::InvalidArgument, fmt::format("node count {} must be even and ≥ 8", n));
  QuadratureNodes q;
  q.points.resize(n);
  q.normals.resize(n);
  q.weights.resize(n);
  q.speeds.resize(n);
  q.params.resize(n);
  const real h = 2.0 * pi / n;
  for (int j = 0; j < n; ++j) {
    const real t = h * j;
    q.params[j] = t;
    q.points[j] = curve.position(t);
    q.normals[j] = curve.inward_normal(t);
    q.speeds[j] = curve.speed(t);
    q.weights[j] = q.speeds[j] * h;
  }
  return q;
}

real lyapunov_exponent(const BoundaryCurve& curve) {
  constexpr int kSample = 4096;
  std::vector<real> lx, ly;
  for (int k = 0; k <= 6; ++k) {
    const real h = 0.1 * std::ldexp(1.0, -k);
    real worst = 0.0;
    for (int j = 0; j < kSample; ++j) {
      const real t = 2.0 * pi * j / kSample;
      // Angle between the normals, so a circle gives exactly h.
      const real chord = (curve.inward_normal(t + h) - curve.inward_normal(t)).norm();
      worst = std::max(worst, 2.0 * std::asin(std::min(1.0, 0.5 * chord)));
    }
    if (worst <= 0.0) return 1.0;  // constant normal field cannot occur on a closed curve, guard anyway
    lx.push_back(std::log(h));
    ly.push_back(std::log(worst));
  }
  const real n = real(lx.size());
  const real mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const real my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  real sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const real slope = sxy / sxx;
  return std::clamp(slope, 1e-6, 1.0);
}

real winding_angle(const QuadratureNodes& nodes, Vec2 x) {
  real s = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const Vec2 d = x - nodes.points[j];
    s += nodes.weights[j] * d.dot(nodes.normals[j]) / d.dot(d);
  }
  return s;
}

}  // namespace sixbie
