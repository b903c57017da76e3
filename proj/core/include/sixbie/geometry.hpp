#pragma once

// Closed analytic boundary curves parameterised by t ∈ [0, 2π), traversed
// counter-clockwise so that the domain D lies to the left and the inward
// normal is the velocity rotated by +90°.

#include <string>
#include <utility>
#include <vector>

#include "sixbie/types.hpp"

namespace sixbie {

enum class CurveKind { circle, ellipse, smooth_star };

const char* to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& s);

struct CurveParams {
  Vec2 center{};
  real radius = 1.0;  // circle, and base radius of the star
  real a = 2.0;       // ellipse semi-axes
  real b = 1.0;
  /// Star: ρ(θ) = radius (1 + Σ amp_k cos(k θ)).
  std::vector<std::pair<int, real>> harmonics;
  /// Regularity floor as a fraction of the mean speed.
  real v_min_fraction = 0.1;
};

class BoundaryCurve {
 public:
  BoundaryCurve(CurveKind kind, CurveParams params);

  CurveKind kind() const { return kind_; }
  const CurveParams& params() const { return params_; }

  Vec2 position(real t) const;
  Vec2 velocity(real t) const;
  real speed(real t) const { return velocity(t).norm(); }
  Vec2 inward_normal(real t) const;
  /// +1: counter-clockwise (D on the left). Fixed by construction, checked
  /// by make_curve through the signed area.
  int orientation() const { return 1; }
  real v_min() const { return v_min_; }
  real mean_speed() const { return mean_speed_; }

 private:
  friend BoundaryCurve make_curve(CurveKind, const CurveParams&);
  CurveKind kind_;
  CurveParams params_;
  real v_min_ = 0.0;
  real mean_speed_ = 0.0;
};

/// Validates regularity (IrregularCurve), the counter-clockwise orientation
/// and simplicity (SelfIntersection) on a fine sample.
BoundaryCurve make_curve(CurveKind kind, const CurveParams& params);

struct QuadratureNodes {
  std::vector<Vec2> points;
  std::vector<Vec2> normals;  // inward, unit
  std::vector<real> weights;  // |γ′(t_j)| 2π/n
  std::vector<real> speeds;   // |γ′(t_j)|
  std::vector<real> params;   // t_j = 2π j/n

  std::size_t size() const { return points.size(); }
  real length() const;
};

/// Equispaced nodes; n ≥ 8 and even. Node j of the n grid is node 2j of the
/// 2n grid.
QuadratureNodes sample_nodes(const BoundaryCurve& curve, int n);

inline constexpr real kLyapunovWarnThreshold = 0.9;

/// Hölder exponent of t ↦ n(t), a least-squares log-log slope of
/// max_t |n(t + h) − n(t)| over h ∈ [0.1·2⁻⁶, 0.1]; clipped to (0, 1].
real lyapunov_exponent(const BoundaryCurve& curve);

/// Trapezoid value of ∮ (x − y)·n_y/|x − y|² dτ_y: 2π for x inside D, 0 outside.
real winding_angle(const QuadratureNodes& nodes, Vec2 x);

}  // namespace sixbie
