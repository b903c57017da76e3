#include "sixbie/boundary_solver.hpp"

#include <fmt/format.h>

#include <Eigen/LU>
#include <algorithm>
#include <limits>

#include "sixbie/error.hpp"

namespace sixbie {

namespace {

// Fourier coefficients of n equispaced samples, modes −n/2 < m ≤ n/2
// stored at index m + n/2 − 1.
std::vector<cplx> dft(const std::vector<cplx>& v) {
  const int n = int(v.size());
  std::vector<cplx> c(n);
  for (int i = 0; i < n; ++i) {
    const int m = i - n / 2 + 1;
    cplx s{};
    for (int k = 0; k < n; ++k) s += v[k] * std::polar(1.0, -2.0 * pi * real((long(m) * k) % n) / n);
    c[i] = s / real(n);
  }
  return c;
}

cplx trig_eval(const std::vector<cplx>& c, real t) {
  const int n = int(c.size());
  cplx s{};
  for (int i = 0; i < n - 1; ++i) s += c[i] * std::polar(1.0, (i - n / 2 + 1) * t);
  return s + c[n - 1] * std::cos(0.5 * n * t);  // Nyquist mode, balanced
}

}  // namespace

BoundaryData BoundaryData::zero() {
  const DataFn z = [](real, cplx) { return cplx{}; };
  return {z, z, z};
}

BoundaryData BoundaryData::from_samples(const CVector& stacked) {
  if (stacked.size() % 3 != 0 || stacked.size() < 6)
    throw Error(ErrorCode::InvalidArgument, "stacked samples must have length 3n");
  const int n = int(stacked.size() / 3);
  BoundaryData d;
  DataFn* slots[3] = {&d.phi0, &d.phi1, &d.phi2};
  for (int s = 0; s < 3; ++s) {
    std::vector<cplx> v(stacked.data() + s * n, stacked.data() + (s + 1) * n);
    auto coef = std::make_shared<const std::vector<cplx>>(dft(v));
    *slots[s] = [coef](real t, cplx) { return trig_eval(*coef, t); };
  }
  return d;
}

real fourier_tail(const BoundaryData& data, cplx lambda, int n) {
  real worst = 0.0;
  for (int s = 0; s < 3; ++s) {
    std::vector<cplx> v(n);
    for (int k = 0; k < n; ++k) v[k] = data[s](2.0 * pi * k / n, lambda);
    const std::vector<cplx> c = dft(v);
    real all = 0.0, tail = 0.0;
    for (int i = 0; i < n; ++i) {
      const int m = std::abs(i - n / 2 + 1);
      all += std::norm(c[i]);
      if (m >= n / 4) tail += std::norm(c[i]);
    }
    if (all > 0.0) worst = std::max(worst, std::sqrt(tail / all));
  }
  return worst;
}

CVector DensityTriple::stacked() const {
  CVector v(mu1.size() + mu2.size() + mu3.size());
  v << mu1, mu2, mu3;
  return v;
}

DensityTriple DensityTriple::from_stacked(const CVector& v) {
  if (v.size() % 3 != 0) throw Error(ErrorCode::InvalidArgument, "stacked density must have length 3n");
  const Eigen::Index n = v.size() / 3;
  return {v.segment(0, n), v.segment(n, n), v.segment(2 * n, n)};
}

CVector BoundarySystem::normalise(const CVector& phi_stacked) const {
  const int nn = n();
  CVector f(3 * nn);
  for (int i = 0; i < nn; ++i) {
    const Eigen::Vector3cd p(phi_stacked[i], phi_stacked[nn + i], phi_stacked[2 * nn + i]);
    const Eigen::Vector3cd q = block_inverse[i] * p;
    for (int r = 0; r < 3; ++r) f[r * nn + i] = q[r];
  }
  return f;
}

namespace {

// Sum of Δᵐ(w1 + w2 + w3) or of a single potential (which = 1..3) over a
// node set carrying `density` (stacked, 3 × nodes.size()).
cplx potential_sum(int which, int m, const CVector& density, const QuadratureNodes& nodes, const KernelContext& ctx,
                   Vec2 x, real spacing_override = 0.0) {
  const int nn = int(nodes.size());
  if (density.size() != 3 * nn && !(which > 0 && density.size() == nn))
    throw Error(ErrorCode::InvalidArgument, "density length does not match the node set");
  real spacing = spacing_override;
  if (spacing <= 0.0)
    for (real w : nodes.weights) spacing = std::max(spacing, w);
  real dmin = std::numeric_limits<real>::infinity();
  for (const Vec2& y : nodes.points) dmin = std::min(dmin, (x - y).norm());
  if (dmin < 5.0 * spacing)
    throw Error(ErrorCode::TooCloseToBoundary,
                fmt::format("point ({}, {}) is {:.3g} from the boundary, clearance {:.3g}", x.x, x.y, dmin, 5.0 * spacing));
  if (std::abs(winding_angle(nodes, x) - 2.0 * pi) > 0.5)
    throw Error(ErrorCode::DomainError, fmt::format("point ({}, {}) is outside the domain", x.x, x.y));

  const RadialProfile p0(ctx.weights(KernelId::P0, m), ctx.kappa);
  const RadialProfile p1(ctx.weights(KernelId::P1, m), ctx.kappa);
  const RadialProfile p3(ctx.weights(KernelId::P3, m), ctx.kappa);
  const RadialProfile p3s(ctx.weights(KernelId::P3star, m), ctx.kappa);
  const bool single = density.size() == nn;
  cplx sum{};
  for (int j = 0; j < nn; ++j) {
    const Vec2 dx = x - nodes.points[j];
    const real r = dx.norm();
    const Vec2 e = dx * (1.0 / r);
    const real w = nodes.weights[j];
    auto mu = [&](int comp) { return single ? density[j] : density[(comp - 1) * nn + j]; };
    if (which == 0 || which == 1) sum += p0.eval(r).f * mu(1) * w;
    if (which == 0 || which == 2) sum += p1.eval(r).f * mu(2) * w;
    if (which == 0 || which == 3)
      sum += (p3.eval(r).f - ctx.beta * trace::hess_nn(p3s.eval(r), e, nodes.normals[j])) * mu(3) * w;
  }
  return sum;
}

}  // namespace

cplx eval_potential_laplacian_power(int which, int m, const CVector& density, const QuadratureNodes& nodes,
                                    const KernelContext& ctx, Vec2 x) {
  if (which < 1 || which > 3) throw Error(ErrorCode::InvalidArgument, "potential index must be 1..3");
  if (m < 0 || m > 3) throw Error(ErrorCode::InvalidArgument, "Laplacian power must be 0..3");
  if (density.size() != Eigen::Index(nodes.size()))
    throw Error(ErrorCode::InvalidArgument, "density length does not match the node set");
  return potential_sum(which, m, density, nodes, ctx, x);
}

cplx eval_potential(int which, const CVector& density, const QuadratureNodes& nodes, const KernelContext& ctx, Vec2 x) {
  return eval_potential_laplacian_power(which, 0, density, nodes, ctx, x);
}

BoundarySystem assemble_system(std::shared_ptr<const NystromAssembler> assembler, const BoundaryData& data) {
  BoundarySystem sys;
  sys.assembler = assembler;
  sys.ctx = assembler->context();
  sys.nodes = assembler->nodes();
  sys.jump_constants = assembler->jumps();
  for (int row = 1; row < 3; ++row) {
    bool any = false;
    for (int col = 0; col < 3; ++col) any = any || std::abs(sys.jump_constants[row][col]) > 0.0;
    if (!any) throw Error(ErrorCode::SingularJump, fmt::format("trace row {} has no jump", row));
  }
  const int n = assembler->n();
  const cplx lam = sys.ctx.lambda.lambda;
  sys.trace_matrix = assembler->assemble(true);
  sys.phi.resize(3 * n);
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < n; ++i) sys.phi[s * n + i] = data[s](sys.nodes.params[i], lam);

  sys.block_inverse.resize(n);
  sys.kernel_matrix = CMatrix::Identity(3 * n, 3 * n);
  for (int i = 0; i < n; ++i) {
    Eigen::Matrix3cd b;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) b(r, c) = sys.trace_matrix(r * n + i, c * n + i);
    Eigen::FullPivLU<Eigen::Matrix3cd> lu(b);
    if (!lu.isInvertible() || lu.rcond() < 1e-14)
      throw Error(ErrorCode::SingularJump, fmt::format("diagonal block at node {} is singular", i));
    sys.block_inverse[i] = lu.inverse();
    Eigen::Matrix<cplx, 3, Eigen::Dynamic> rows(3, 3 * n);
    for (int r = 0; r < 3; ++r) rows.row(r) = sys.trace_matrix.row(r * n + i);
    const Eigen::Matrix<cplx, 3, Eigen::Dynamic> scaled = sys.block_inverse[i] * rows;
    for (int r = 0; r < 3; ++r) sys.kernel_matrix.row(r * n + i) -= scaled.row(r);
  }
  sys.rhs = sys.normalise(sys.phi);
  return sys;
}

BoundarySystem assemble_system(const KernelContext& ctx, const BoundaryCurve& curve, int n, const BoundaryData& data,
                               NystromOptions opts) {
  return assemble_system(std::make_shared<const NystromAssembler>(ctx, curve, n, opts), data);
}

DensityTriple solve_neumann(const BoundarySystem& system, real tol, int max_iter, NeumannReport* report) {
  NeumannReport local;
  NeumannReport& rep = report ? *report : local;
  rep = {};
  const CVector& f = system.rhs;
  const real fnorm = f.norm();
  if (fnorm == 0.0) {
    rep.converged = true;
    return DensityTriple::from_stacked(CVector::Zero(f.size()));
  }
  CVector mu = f;
  int growing = 0;
  auto contraction = [&] {
    const auto& u = rep.update_norms;
    const int k = int(u.size());
    const int span = std::min(5, k - 1);
    if (span <= 0 || u[k - 1 - span] <= 0.0) return 0.0;
    return std::pow(u[k - 1] / u[k - 1 - span], 1.0 / span);
  };
  for (int it = 1; it <= max_iter; ++it) {
    CVector next = f + system.kernel_matrix * mu;
    const real upd = (next - mu).norm();
    mu.swap(next);
    rep.iterations = it;
    if (!rep.update_norms.empty() && upd > rep.update_norms.back()) ++growing;
    else growing = 0;
    rep.update_norms.push_back(upd);
    rep.contraction = contraction();
    if (upd <= tol * fnorm) {
      rep.converged = true;
      return DensityTriple::from_stacked(mu);
    }
    if (growing >= 5)
      throw Error(ErrorCode::Divergence,
                  fmt::format("successive approximations diverge at |λ| = {:.4g}: contraction {:.4f} after {} iterations",
                              std::abs(system.ctx.lambda.lambda), rep.contraction, it));
  }
  throw Error(ErrorCode::MaxIterExceeded,
              fmt::format("no convergence in {} iterations (contraction {:.4f})", max_iter, rep.contraction));
}

DensityTriple solve_direct(const BoundarySystem& system, DirectReport* report) {
  DirectReport local;
  DirectReport& rep = report ? *report : local;
  const Eigen::Index n = system.kernel_matrix.rows();
  const CMatrix m = CMatrix::Identity(n, n) - system.kernel_matrix;
  const Eigen::PartialPivLU<CMatrix> lu(m);
  rep.rcond = lu.rcond();
  if (!(rep.rcond >= 1e-13))
    throw Error(ErrorCode::NearSingularSystem, fmt::format("reciprocal condition estimate {:.3e}", rep.rcond));
  CVector mu = lu.solve(system.rhs);
  const real fn = system.rhs.norm();
  CVector r = system.rhs - m * mu;
  rep.residual = fn > 0.0 ? r.norm() / fn : 0.0;
  // Iterative refinement; stops once a step no longer halves the residual.
  for (int step = 0; step < 3 && rep.residual > 1e-14; ++step) {
    const CVector trial = mu + lu.solve(r);
    const CVector rt = system.rhs - m * trial;
    const real res = rt.norm() / fn;
    if (!(res < 0.5 * rep.residual)) break;
    mu = trial;
    r = rt;
    rep.residual = res;
  }
  if (!(rep.residual <= 1e-10))
    throw Error(ErrorCode::NearSingularSystem, fmt::format("LU residual {:.3e} (rcond {:.3e})", rep.residual, rep.rcond));
  return DensityTriple::from_stacked(mu);
}

const char* to_string(SolveMethod m) { return m == SolveMethod::neumann ? "neumann" : "direct"; }

SolveMethod solve_method_from_string(const std::string& s) {
  if (s == "neumann") return SolveMethod::neumann;
  if (s == "direct") return SolveMethod::direct;
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown method '{}'", s));
}

Solution::Solution(DensityTriple densities, std::shared_ptr<const NystromAssembler> assembler, SolveDiagnostics diag)
    : densities_(std::move(densities)), assembler_(std::move(assembler)), diag_(std::move(diag)) {
  fine_ = assembler_->upsample_density(densities_.stacked());
}

real Solution::clearance() const {
  real spacing = 0.0;
  for (real w : assembler_->fine_nodes().weights) spacing = std::max(spacing, w);
  return 5.0 * spacing;
}

cplx Solution::evaluate_laplacian_power(Vec2 x, int m) const {
  if (m < 0 || m > 3) throw Error(ErrorCode::InvalidArgument, "Laplacian power must be 0..3");
  return potential_sum(0, m, fine_, assembler_->fine_nodes(), assembler_->context(), x);
}

cplx Solution::evaluate(Vec2 x) const { return evaluate_laplacian_power(x, 0); }

namespace {

std::vector<int> midpoint_targets(const NystromAssembler& a) {
  std::vector<int> q(a.n());
  for (int i = 0; i < a.n(); ++i) q[i] = i * a.upsample() + a.upsample() / 2;
  return q;
}

// max over traces of max|computed − expected| / max|expected|, target-major input.
real trace_mismatch(const CVector& computed, const CVector& expected) {
  real worst = 0.0;
  const Eigen::Index nt = computed.size() / 3;
  for (int row = 0; row < 3; ++row) {
    real err = 0.0, mag = 0.0;
    for (Eigen::Index i = 0; i < nt; ++i) {
      err = std::max(err, std::abs(computed[3 * i + row] - expected[3 * i + row]));
      mag = std::max(mag, std::abs(expected[3 * i + row]));
    }
    worst = std::max(worst, mag > 0.0 ? err / mag : err);
  }
  return worst;
}

}  // namespace

Solution solve_bvp(const Coefficients& coeffs, const BoundaryCurve& curve, int n, const SpectralParameter& lambda,
                   const BoundaryData& data, SolveMethod method, SolveOptions opts) {
  const KernelContext ctx = KernelContext::make(coeffs, lambda);
  auto assembler = std::make_shared<const NystromAssembler>(ctx, curve, n, opts.nystrom);
  const BoundarySystem sys = assemble_system(assembler, data);
  SolveDiagnostics diag;
  diag.method = method;
  DensityTriple mu;
  if (method == SolveMethod::neumann) {
    try {
      mu = solve_neumann(sys, opts.tol, opts.max_iter, &diag.neumann);
    } catch (const Error& e) {
      if (!opts.fallback_direct) throw;
      diag.warnings.push_back(fmt::format("{}; fell back to the direct solver", e.what()));
      diag.method = SolveMethod::direct;
      mu = solve_direct(sys, &diag.direct);
    }
  } else {
    mu = solve_direct(sys, &diag.direct);
  }

  const std::vector<int> mids = midpoint_targets(*assembler);
  const CVector traces = assembler->trace_rows(mids) * mu.stacked();
  CVector expected(traces.size());
  for (std::size_t i = 0; i < mids.size(); ++i) {
    const real t = assembler->fine_nodes().params[mids[i]];
    for (int s = 0; s < 3; ++s) expected[3 * i + s] = data[s](t, lambda.lambda);
  }
  diag.boundary_reproduction = trace_mismatch(traces, expected);
  diag.data_fourier_tail = fourier_tail(data, lambda.lambda, n);
  if (diag.data_fourier_tail > 1e-6)
    diag.warnings.push_back(fmt::format("boundary data Fourier tail {:.2e} exceeds 1e-6", diag.data_fourier_tail));
  diag.lyapunov = lyapunov_exponent(curve);
  if (diag.lyapunov < kLyapunovWarnThreshold)
    diag.warnings.push_back(fmt::format("normal field Hölder exponent {:.3f} below {}", diag.lyapunov, kLyapunovWarnThreshold));
  return Solution(std::move(mu), assembler, std::move(diag));
}

real residual_pde(const Solution& sol, const std::vector<Vec2>& points) {
  const KernelContext& ctx = sol.assembler().context();
  const cplx l2 = ctx.lambda.lambda * ctx.lambda.lambda;
  const cplx scale[4] = {l2 * l2 * l2, ctx.coeffs.a2 * l2 * l2, ctx.coeffs.a1 * l2, ctx.coeffs.a0};
  real worst = 0.0;
  for (const Vec2& x : points) {
    cplx sum{};
    real mag = 0.0;
    for (int m = 0; m <= 3; ++m) {
      const cplx term = scale[m] * sol.evaluate_laplacian_power(x, m);
      sum += term;
      mag += std::abs(term);
    }
    worst = std::max(worst, mag > 0.0 ? std::abs(sum) / mag : 0.0);
  }
  return worst;
}

AnalyticityResult analyticity_check(const Coefficients& coeffs, const BoundaryCurve& curve, int n,
                                    const SpectralParameter& center, real radius, int points, const BoundaryData& data,
                                    Vec2 x, SolveOptions opts) {
  const cplx l0 = center.lambda;
  const real mod = std::abs(l0);
  const real arg = std::arg(l0);
  const Sector& sec = center.sector;
  if (!(radius > 0.0) || points < 2) throw Error(ErrorCode::InvalidArgument, "need a positive radius and ≥ 2 points");
  if (!(mod - radius > sec.radius) || radius >= mod)
    throw Error(ErrorCode::SectorConditionViolated,
                fmt::format("disk |λ − λ0| ≤ {} reaches |λ| ≤ R = {}", radius, sec.radius));
  const real spread = std::asin(radius / mod);
  if (!(arg - spread >= -pi / 4.0 + sec.delta) || !(arg + spread < pi / 4.0))
    throw Error(ErrorCode::SectorConditionViolated,
                fmt::format("disk around arg λ0 = {:.4f} spans ±{:.4f}, outside [−π/4 + δ, π/4)", arg, spread));

  const KernelContext ctx0 = KernelContext::make(coeffs, center);
  SpectralParameter far = center;
  far.lambda = std::polar(mod + radius, arg);
  const KernelContext ctx_far = KernelContext::make(coeffs, far);
  NystromOptions pinned = opts.nystrom;
  if (!pinned.window_scale) pinned.window_scale = ctx0.kappa_max;
  if (pinned.upsample <= 0) pinned.upsample = NystromAssembler::choose_upsample(ctx_far, curve, n, pinned);
  SolveOptions so = opts;
  so.nystrom = pinned;

  AnalyticityResult res;
  res.center_value = solve_bvp(coeffs, curve, n, center, data, SolveMethod::direct, so).evaluate(x);
  cplx sum{};
  for (int k = 0; k < points; ++k) {
    SpectralParameter p = center;
    p.lambda = l0 + std::polar(radius, 2.0 * pi * k / points);
    sum += solve_bvp(coeffs, curve, n, p, data, SolveMethod::direct, so).evaluate(x);
  }
  res.cauchy_mean = sum / real(points);
  const real denom = std::abs(res.center_value);
  res.defect = std::abs(res.cauchy_mean - res.center_value) / (denom > 0.0 ? denom : 1.0);
  return res;
}

ManufacturedProblem make_manufactured(const KernelContext& ctx, const BoundaryCurve& curve, int n, NystromOptions opts) {
  const int p = NystromAssembler::choose_upsample(ctx, curve, n, opts);
  NystromOptions ref = opts;
  ref.upsample = 2 * p;
  const NystromAssembler a(ctx, curve, n, ref);
  ManufacturedProblem mp;
  mp.reference_upsample = ref.upsample;
  const QuadratureNodes& nodes = a.nodes();
  mp.planted.mu1.resize(n);
  mp.planted.mu2.resize(n);
  mp.planted.mu3.resize(n);
  for (int i = 0; i < n; ++i) {
    const real t = nodes.params[i];
    mp.planted.mu1[i] = std::exp(std::cos(t));
    mp.planted.mu2[i] = 1.0 + 0.5 * std::sin(2.0 * t);
    mp.planted.mu3[i] = cplx(std::cos(t), 0.3 * std::sin(t));
  }
  const CVector mu = mp.planted.stacked();
  mp.phi = a.assemble(true) * mu;
  mp.data = BoundaryData::from_samples(mp.phi);
  const std::vector<int> mids = midpoint_targets(a);
  for (int q : mids) mp.check_params.push_back(a.fine_nodes().params[q]);
  mp.check_values = a.trace_rows(mids) * mu;
  return mp;
}

real boundary_reproduction_error(const Solution& sol, const ManufacturedProblem& mp) {
  const NystromAssembler& a = sol.assembler();
  std::vector<int> q;
  for (real t : mp.check_params) {
    const real idx = t * a.fine_n() / (2.0 * pi);
    const long r = std::lround(idx);
    if (std::abs(idx - r) > 1e-9)
      throw Error(ErrorCode::InvalidArgument, "check point is not on the solver's fine grid");
    q.push_back(int(r));
  }
  return trace_mismatch(a.trace_rows(q) * sol.densities().stacked(), mp.check_values);
}

}  // namespace sixbie
