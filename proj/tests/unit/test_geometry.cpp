#include <gtest/gtest.h>

#include "sixbie/error.hpp"
#include "sixbie/geometry.hpp"
#include "sixbie/quadrature.hpp"

using namespace sixbie;

namespace {

BoundaryCurve ellipse(real a = 2.0, real b = 1.0, real v_min_fraction = 0.1) {
  CurveParams p;
  p.a = a;
  p.b = b;
  p.v_min_fraction = v_min_fraction;
  return make_curve(CurveKind::ellipse, p);
}

BoundaryCurve star(std::vector<std::pair<int, real>> h) {
  CurveParams p;
  p.harmonics = std::move(h);
  return make_curve(CurveKind::smooth_star, p);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sixbie::Error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Geometry, CircleLength) {
  const QuadratureNodes q = sample_nodes(make_curve(CurveKind::circle, {}), 64);
  EXPECT_NEAR(q.length(), 2 * pi, 1e-12);
}

TEST(Geometry, EllipseLengthAgainstAdaptiveArcLength) {
  const BoundaryCurve c = ellipse();
  const QuadratureResult ref = integrate_adaptive([&](real t) { return cplx(c.speed(t)); }, 0.0, 2 * pi, 1e-15, 1e-15, 2000);
  ASSERT_TRUE(ref.converged);
  EXPECT_NEAR(ref.value.real(), 9.688448220547675, 1e-12);
  EXPECT_NEAR(sample_nodes(c, 128).length(), 9.688448220547675, 1e-12);
}

TEST(Geometry, CircleNodes) {
  const QuadratureNodes q = sample_nodes(make_curve(CurveKind::circle, {}), 8);
  for (int j = 0; j < 8; ++j) {
    const real t = 2 * pi * j / 8;
    EXPECT_NEAR(q.points[j].x, std::cos(t), 1e-15);
    EXPECT_NEAR(q.points[j].y, std::sin(t), 1e-15);
    EXPECT_NEAR(q.normals[j].x, -q.points[j].x, 1e-15);
    EXPECT_NEAR(q.normals[j].y, -q.points[j].y, 1e-15);
    EXPECT_NEAR(q.weights[j], 2 * pi / 8, 1e-15);
  }
}

TEST(Geometry, NestedGrids) {
  const BoundaryCurve c = ellipse();
  const QuadratureNodes a = sample_nodes(c, 256), b = sample_nodes(c, 512);
  for (int j = 0; j < 256; ++j) {
    EXPECT_EQ(a.points[j].x, b.points[2 * j].x);
    EXPECT_EQ(a.points[j].y, b.points[2 * j].y);
    EXPECT_EQ(a.params[j], b.params[2 * j]);
  }
}

TEST(Geometry, NormalsOrthogonalAndUnit) {
  for (const BoundaryCurve& c : {ellipse(), star({{3, 0.2}, {5, 0.05}})}) {
    const QuadratureNodes q = sample_nodes(c, 256);
    for (std::size_t j = 0; j < q.size(); ++j) {
      const Vec2 v = c.velocity(q.params[j]);
      EXPECT_NEAR(q.normals[j].dot(v) / v.norm(), 0.0, 1e-12);
      EXPECT_NEAR(q.normals[j].norm(), 1.0, 1e-14);
    }
  }
}

TEST(Geometry, WindingIdentifiesInterior) {
  for (const BoundaryCurve& c : {ellipse(), star({{3, 0.2}}), make_curve(CurveKind::circle, {})}) {
    const QuadratureNodes q = sample_nodes(c, 256);
    EXPECT_NEAR(winding_angle(q, {0.1, 0.05}), 2 * pi, 1e-8);
    EXPECT_NEAR(winding_angle(q, {5.0, 3.0}), 0.0, 1e-8);
    // An inward step from a boundary point lands inside.
    const Vec2 x = q.points[17] + q.normals[17] * 0.2;
    EXPECT_NEAR(winding_angle(q, x), 2 * pi, 1e-8);
  }
}

TEST(Geometry, ClosedCurve) {
  const BoundaryCurve c = star({{2, 0.3}});
  const Vec2 a = c.position(0.0), b = c.position(2 * pi);
  EXPECT_NEAR(a.x, b.x, 1e-14);
  EXPECT_NEAR(a.y, b.y, 1e-14);
}

TEST(Geometry, LyapunovExponent) {
  EXPECT_NEAR(lyapunov_exponent(make_curve(CurveKind::circle, {})), 1.0, 1e-9);
  EXPECT_NEAR(lyapunov_exponent(ellipse()), 1.0, 0.02);
  // A thin ellipse has near-corners at its tips on the fit scales.
  const real thin = lyapunov_exponent(ellipse(2.0, 0.04, 0.01));
  EXPECT_LT(thin, kLyapunovWarnThreshold);
  EXPECT_GT(thin, 0.0);
}

TEST(Geometry, Rejections) {
  EXPECT_EQ(code_of([] { star({{5, 0.9}}); }), ErrorCode::IrregularCurve);
  EXPECT_EQ(code_of([] { star({{0, 0.1}}); }), ErrorCode::IrregularCurve);
  CurveParams p;
  p.radius = -1.0;
  EXPECT_EQ(code_of([&] { make_curve(CurveKind::circle, p); }), ErrorCode::IrregularCurve);
  EXPECT_EQ(code_of([] { sample_nodes(make_curve(CurveKind::circle, {}), 9); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { sample_nodes(make_curve(CurveKind::circle, {}), 6); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { curve_kind_from_string("square"); }), ErrorCode::InvalidArgument);
}

TEST(Geometry, KindNamesRoundTrip) {
  for (CurveKind k : {CurveKind::circle, CurveKind::ellipse, CurveKind::smooth_star})
    EXPECT_EQ(curve_kind_from_string(to_string(k)), k);
}
