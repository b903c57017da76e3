#include <gtest/gtest.h>

#include <cmath>

#include "sixbie/boundary_solver.hpp"
#include "sixbie/error.hpp"

using namespace sixbie;

namespace {

const Coefficients kCoeffs{cplx(0, 2), cplx(2, -3), cplx(-3, 1)};
const Vec2 kInside{0.3, 0.2};

KernelContext ctx_at(cplx lam) { return KernelContext::make(kCoeffs, {lam, {}}); }
BoundaryCurve ellipse() { return make_curve(CurveKind::ellipse, {}); }

BoundaryData trig_data() {
  return {[](real t, cplx) { return cplx(1.0 + 0.5 * std::cos(t)); },
          [](real t, cplx) { return cplx(0.3 * std::sin(2 * t)); },
          [](real t, cplx) { return cplx(0.0, 0.2 * std::cos(t)); }};
}

CVector smooth_density(const QuadratureNodes& nodes) {
  CVector mu(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) mu[j] = std::exp(std::cos(nodes.params[j]));
  return mu;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

real rel_diff(const CVector& a, const CVector& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(BoundarySolver, PotentialOfZeroDensityVanishes) {
  const auto ctx = ctx_at(16.0);
  const auto nodes = sample_nodes(ellipse(), 128);
  const CVector zero = CVector::Zero(128);
  for (int w = 1; w <= 3; ++w) EXPECT_EQ(eval_potential(w, zero, nodes, ctx, kInside), cplx(0.0));
}

TEST(BoundarySolver, PotentialIsLinearInDensity) {
  const auto ctx = ctx_at(16.0);
  const auto nodes = sample_nodes(ellipse(), 128);
  const CVector a = smooth_density(nodes);
  CVector b(128);
  for (int j = 0; j < 128; ++j) b[j] = cplx(std::sin(nodes.params[j]), 1.0);
  const cplx s(0.7, -1.3);
  for (int w = 1; w <= 3; ++w) {
    const cplx lhs = eval_potential(w, a + s * b, nodes, ctx, kInside);
    const cplx rhs = eval_potential(w, a, nodes, ctx, kInside) + s * eval_potential(w, b, nodes, ctx, kInside);
    EXPECT_LT(std::abs(lhs - rhs), 1e-13 * std::abs(rhs)) << w;
  }
}

TEST(BoundarySolver, PotentialConvergesUnderRefinement) {
  const auto ctx = ctx_at(4.0);
  const auto curve = ellipse();
  const auto coarse = sample_nodes(curve, 128), fine = sample_nodes(curve, 256);
  for (int w = 1; w <= 3; ++w) {
    const cplx a = eval_potential(w, smooth_density(coarse), coarse, ctx, kInside);
    const cplx b = eval_potential(w, smooth_density(fine), fine, ctx, kInside);
    EXPECT_LT(std::abs(a - b), 1e-9 * std::abs(b)) << w;
  }
}

TEST(BoundarySolver, PotentialRefusesPointsNearTheCurve) {
  const auto ctx = ctx_at(16.0);
  const auto curve = ellipse();
  const auto nodes = sample_nodes(curve, 64);
  const Vec2 x = curve.position(0.5) + 1e-3 * curve.inward_normal(0.5);
  EXPECT_EQ(code_of([&] { eval_potential(1, smooth_density(nodes), nodes, ctx, x); }),
            ErrorCode::TooCloseToBoundary);
}

TEST(BoundarySolver, CalibratedJumpsMatchAnalytic) {
  const JumpCalibration cal = calibrate_jumps(ctx_at(16.0), ellipse());
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) EXPECT_LE(cal.deviation[r][c], cal.tolerance) << r << "," << c;
  EXPECT_TRUE(cal.zero_case[0][0]);
  EXPECT_FALSE(cal.zero_case[1][1]);
}

TEST(BoundarySolver, ZeroDataGivesZeroDensities) {
  const auto sys = assemble_system(ctx_at(16.0), ellipse(), 64, BoundaryData::zero());
  const DensityTriple d = solve_direct(sys);
  EXPECT_EQ(d.stacked().norm(), 0.0);
  const DensityTriple n = solve_neumann(sys, 1e-10, 10);
  EXPECT_EQ(n.stacked().norm(), 0.0);
}

TEST(BoundarySolver, DirectSolveResidual) {
  const auto sys = assemble_system(ctx_at(16.0), ellipse(), 128, trig_data());
  DirectReport rep;
  const DensityTriple d = solve_direct(sys, &rep);
  EXPECT_LT(rep.residual, 1e-12);
  EXPECT_GT(rep.rcond, 1e-13);
  const CVector mu = d.stacked();
  const CVector r = mu - sys.kernel_matrix * mu - sys.rhs;
  EXPECT_LT(r.norm(), 1e-11 * sys.rhs.norm());
  // The unnormalised residual carries the scale spread between the value row
  // (self-block ~ h ln h) and the ∂/∂n Δ² row.
  EXPECT_LT((sys.trace_matrix * mu - sys.phi).norm(), 1e-6 * sys.phi.norm());
}

// At N = 128 the successive approximations contract for λ = 16.
TEST(BoundarySolver, NeumannAgreesWithDirect) {
  const auto sys = assemble_system(ctx_at(16.0), ellipse(), 128, trig_data());
  NeumannReport rep;
  const CVector it = solve_neumann(sys, 1e-12, 500, &rep).stacked();
  EXPECT_TRUE(rep.converged);
  EXPECT_LT(rep.contraction, 1.0);
  EXPECT_LT(rel_diff(it, solve_direct(sys).stacked()), 1e-8);
}

TEST(BoundarySolver, NeumannReportsDivergence) {
  const auto sys = assemble_system(ctx_at(16.0), ellipse(), 256, trig_data());
  NeumannReport rep;
  const ErrorCode c = code_of([&] { solve_neumann(sys, 1e-12, 400, &rep); });
  EXPECT_TRUE(c == ErrorCode::Divergence || c == ErrorCode::MaxIterExceeded);
  EXPECT_FALSE(rep.converged);
  EXPECT_GT(rep.iterations, 0);
}

TEST(BoundarySolver, ManufacturedDensitiesRecovered) {
  const auto ctx = ctx_at(16.0);
  const auto curve = ellipse();
  const ManufacturedProblem mp = make_manufactured(ctx, curve, 128);
  const Solution sol = solve_bvp(kCoeffs, curve, 128, ctx.lambda, mp.data, SolveMethod::direct);
  EXPECT_LT(rel_diff(sol.densities().stacked(), mp.planted.stacked()), 1e-4);
  EXPECT_LT(boundary_reproduction_error(sol, mp), 1e-5);
}

TEST(BoundarySolver, PdeResidualSmallInsideAndGrowsTowardTheCurve) {
  const auto curve = ellipse();
  const Solution sol = solve_bvp(kCoeffs, curve, 128, {16.0, {}}, trig_data(), SolveMethod::direct);
  EXPECT_LT(residual_pde(sol, {kInside, {-0.5, 0.1}, {0.9, -0.3}}), 1e-10);
  auto at = [&](real d) { return residual_pde(sol, {curve.position(0.7) + d * curve.inward_normal(0.7)}); };
  EXPECT_GT(at(0.1), at(0.4));
}

TEST(BoundarySolver, AnalyticityCheck) {
  const auto curve = ellipse();
  const AnalyticityResult r =
      analyticity_check(kCoeffs, curve, 64, {20.0, {}}, 2.0, 16, trig_data(), kInside);
  EXPECT_LT(r.defect, 1e-8);
  EXPECT_EQ(code_of([&] { analyticity_check(kCoeffs, curve, 64, {cplx(16, 15), {}}, 2.0, 16, trig_data(), kInside); }),
            ErrorCode::SectorConditionViolated);
}

// Gain ‖μ‖/‖f‖ from the normalised right-hand side; saturates in |λ|.
TEST(BoundarySolver, DensityGainBoundedInLambda) {
  const auto curve = ellipse();
  std::vector<real> gain;
  for (real lam : {8.0, 16.0, 32.0, 64.0}) {
    const auto sys = assemble_system(ctx_at(lam), curve, 128, trig_data());
    gain.push_back(solve_direct(sys).stacked().norm() / sys.rhs.norm());
  }
  for (real g : gain) EXPECT_LT(g, 100.0);
  EXPECT_LT(gain[3] / gain[2], 1.5);
}
