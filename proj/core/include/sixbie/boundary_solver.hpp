#pragma once

// Layer-potential ansatz u = w1 + w2 + w3 with kernels P0, P1, P2, the
// interior boundary traces (value, ∂/∂n, ∂/∂n Δ²) and the resulting
// second-kind system μ = f + 𝒦μ.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sixbie/geometry.hpp"
#include "sixbie/kernels.hpp"
#include "sixbie/nystrom.hpp"

namespace sixbie {

/// φ(t, λ) on the boundary parameter t.
using DataFn = std::function<cplx(real t, cplx lambda)>;

struct BoundaryData {
  DataFn phi0, phi1, phi2;

  static BoundaryData zero();
  /// Trigonometric interpolants of node samples, stacked (φ0, φ1, φ2) over
  /// n equispaced nodes; independent of λ.
  static BoundaryData from_samples(const CVector& stacked);

  const DataFn& operator[](int s) const { return s == 0 ? phi0 : s == 1 ? phi1 : phi2; }
};

/// Largest relative energy in the upper half of the Fourier spectrum of the
/// three data functions sampled at n nodes. Small values mean the data are
/// resolved and at least C³ in practice.
real fourier_tail(const BoundaryData& data, cplx lambda, int n);

struct DensityTriple {
  CVector mu1, mu2, mu3;

  CVector stacked() const;
  static DensityTriple from_stacked(const CVector& v);
};

struct BoundarySystem {
  CMatrix kernel_matrix;  // 𝒦 = I − B⁻¹A
  CVector rhs;            // f = B⁻¹φ
  JumpTable jump_constants;
  QuadratureNodes nodes;
  KernelContext ctx;
  /// Interior-limit trace matrix A (A μ = φ) and the per-node 3×3
  /// normalisation B, the diagonal blocks of A.
  CMatrix trace_matrix;
  std::vector<Eigen::Matrix3cd> block_inverse;
  CVector phi;
  std::shared_ptr<const NystromAssembler> assembler;

  int n() const { return int(nodes.size()); }
  /// f for new boundary samples without reassembly.
  CVector normalise(const CVector& phi_stacked) const;
};

/// Solution-independent interior evaluation of w_which (1..3) for a density
/// sampled on `nodes` (trapezoid rule). Throws TooCloseToBoundary when x is
/// within 5 node spacings of the curve.
cplx eval_potential(int which, const CVector& density, const QuadratureNodes& nodes, const KernelContext& ctx, Vec2 x);

/// Δᵐ w_which, m ∈ 0..3, under the same rule.
cplx eval_potential_laplacian_power(int which, int m, const CVector& density, const QuadratureNodes& nodes,
                                    const KernelContext& ctx, Vec2 x);

struct JumpCalibration {
  JumpTable analytic{};
  JumpTable measured{};
  /// |measured − analytic| / |analytic|, or the absolute defect normalised by
  /// the row scale where the analytic jump vanishes.
  std::array<std::array<real, 3>, 3> deviation{};
  std::array<std::array<bool, 3>, 3> zero_case{};
  real target_t = 0.0;
  std::vector<real> steps;
  real tolerance = 1e-4;
};

struct CalibrationOptions {
  real target_t = 0.7;
  real h0 = 0.02;
  int levels = 7;
  real tolerance = 1e-4;
  bool throw_on_mismatch = true;
};

/// Measures interior-minus-principal-value constants from off-curve
/// evaluations along ±h n_z of the three traces of each potential with unit
/// density, Richardson-extrapolated to h → 0, and compares them with
/// analytic_jumps. Throws CalibrationMismatch when a deviation exceeds the
/// tolerance.
JumpCalibration calibrate_jumps(const KernelContext& ctx, const BoundaryCurve& curve, CalibrationOptions opts = {});

/// Assembles A, folds in the analytic jumps and normalises each node by its
/// 3×3 diagonal block. Throws SingularJump when a block is singular.
BoundarySystem assemble_system(const KernelContext& ctx, const BoundaryCurve& curve, int n, const BoundaryData& data,
                               NystromOptions opts = {});
BoundarySystem assemble_system(std::shared_ptr<const NystromAssembler> assembler, const BoundaryData& data);

struct NeumannReport {
  int iterations = 0;
  real contraction = 0.0;  // geometric mean of the last update ratios
  std::vector<real> update_norms;
  bool converged = false;
};

struct DirectReport {
  real residual = 0.0;  // ‖(I − 𝒦)μ − f‖ / ‖f‖
  real rcond = 0.0;
};

/// μ⁽⁰⁾ = f, μ⁽ᵐ⁺¹⁾ = f + 𝒦μ⁽ᵐ⁾ until ‖μ⁽ᵐ⁺¹⁾ − μ⁽ᵐ⁾‖ ≤ tol ‖f‖. Throws
/// Divergence after 5 consecutive growing updates and MaxIterExceeded. The
/// report is filled before either is thrown.
DensityTriple solve_neumann(const BoundarySystem& system, real tol, int max_iter, NeumannReport* report = nullptr);

/// Dense LU of (I − 𝒦). Throws NearSingularSystem when the reciprocal
/// condition estimate is below 1e−13 or the residual exceeds 1e−10 ‖f‖.
DensityTriple solve_direct(const BoundarySystem& system, DirectReport* report = nullptr);

enum class SolveMethod { neumann, direct };
const char* to_string(SolveMethod m);
SolveMethod solve_method_from_string(const std::string& s);

struct SolveDiagnostics {
  SolveMethod method = SolveMethod::direct;
  NeumannReport neumann;
  DirectReport direct;
  /// max over off-node boundary points and traces of |trace − φ| / max|φ|
  real boundary_reproduction = 0.0;
  real data_fourier_tail = 0.0;
  real lyapunov = 1.0;
  std::vector<std::string> warnings;
};

class Solution {
 public:
  Solution(DensityTriple densities, std::shared_ptr<const NystromAssembler> assembler, SolveDiagnostics diag);

  const DensityTriple& densities() const { return densities_; }
  const SolveDiagnostics& diagnostics() const { return diag_; }
  SolveDiagnostics& diagnostics() { return diag_; }
  const NystromAssembler& assembler() const { return *assembler_; }
  cplx lambda() const { return assembler_->context().lambda.lambda; }

  /// u(x, λ) = w1 + w2 + w3; x must lie in D at least clearance() from τ.
  cplx evaluate(Vec2 x) const;
  /// Δᵐ u, m ∈ 0..3.
  cplx evaluate_laplacian_power(Vec2 x, int m) const;
  real clearance() const;

 private:
  DensityTriple densities_;
  CVector fine_;
  std::shared_ptr<const NystromAssembler> assembler_;
  SolveDiagnostics diag_;
};

struct SolveOptions {
  NystromOptions nystrom;
  real tol = 1e-10;
  int max_iter = 200;
  /// Fall back to the direct solver when the successive approximations fail.
  bool fallback_direct = false;
};

/// Roots, nodes, assembly, solve and diagnostics in one pass.
Solution solve_bvp(const Coefficients& coeffs, const BoundaryCurve& curve, int n, const SpectralParameter& lambda,
                   const BoundaryData& data, SolveMethod method, SolveOptions opts = {});

/// max over points of |A0Δ³u + A1λ²Δ²u + A2λ⁴Δu + λ⁶u| normalised by the sum
/// of the four term magnitudes.
real residual_pde(const Solution& sol, const std::vector<Vec2>& points);

struct AnalyticityResult {
  cplx center_value{};
  cplx cauchy_mean{};
  real defect = 0.0;
};

/// Compares u(x, λ0) with the mean of u(x, λ) over M points of the circle
/// |λ − λ0| = ρ. Throws SectorConditionViolated unless the closed disk lies
/// in R_δ. The quadrature window scale and upsampling are pinned at their
/// λ0 values so that the discrete operator is analytic in λ.
AnalyticityResult analyticity_check(const Coefficients& coeffs, const BoundaryCurve& curve, int n,
                                    const SpectralParameter& center, real radius, int points,
                                    const BoundaryData& data, Vec2 x, SolveOptions opts = {});

/// Planted densities and the boundary data they generate through a finer
/// reference discretisation.
struct ManufacturedProblem {
  DensityTriple planted;
  BoundaryData data;
  CVector phi;            // stacked samples at the n nodes
  std::vector<real> check_params;  // midpoints between nodes
  CVector check_values;   // reference traces there, stacked target-major
  int reference_upsample = 0;
};

/// The planted family is μ1 = e^{cos t}, μ2 = 1 + ½ sin 2t,
/// μ3 = cos t + 0.3i sin t. The reference discretisation uses twice the
/// working upsampling factor.
ManufacturedProblem make_manufactured(const KernelContext& ctx, const BoundaryCurve& curve, int n,
                                      NystromOptions opts = {});

/// Traces of the solved density at the reference check points, compared
/// with check_values: max relative error.
real boundary_reproduction_error(const Solution& sol, const ManufacturedProblem& mp);

}  // namespace sixbie
