#include <filesystem>

#include <fmt/format.h>

#include "sixbie/boundary_solver.hpp"
#include "sixbie/harness.hpp"
#include "sixbie/kernels.hpp"
#include "sixbie/nystrom.hpp"

namespace sixbie::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr KernelId kAllKernels[] = {KernelId::P0, KernelId::P1, KernelId::P2, KernelId::P3, KernelId::P3star};

// Settings for one suite: the "verify.<suite>" object, with defaults.
struct Settings {
  json j;
  template <class T>
  T get(const char* key, T fallback) const {
    return j.contains(key) ? j[key].get<T>() : fallback;
  }
};

cplx cplx_from(const json& v) { return v.is_array() ? cplx(v[0].get<real>(), v[1].get<real>()) : cplx(v.get<real>()); }

std::vector<cplx> lambdas_from(const Settings& s, const char* key, std::vector<cplx> fallback) {
  if (!s.j.contains(key)) return fallback;
  std::vector<cplx> out;
  for (const json& v : s.j[key]) out.push_back(cplx_from(v));
  return out;
}

std::vector<real> linspace(real a, real b, int n) {
  std::vector<real> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

// Five parameters spread over moduli and over the argument range of R_δ.
std::vector<cplx> sector_samples(const Sector& sec) {
  // The closed lower edge is nudged inward so polar() rounding stays inside.
  const real lo = -pi / 4 + sec.delta + 1e-12, hi = pi / 4 - 0.5 * sec.delta;
  const real mods[5] = {8, 16, 24, 32, 64};
  std::vector<cplx> out;
  for (int i = 0; i < 5; ++i) out.push_back(std::polar(mods[i], lo + (hi - lo) * i / 4));
  return out;
}

// Data for suites that need λ-analytic closed-form boundary functions.
BoundaryData suite_data(const ProblemConfig& cfg) {
  if (cfg.data.family != "manufactured") return make_boundary_data(cfg.data);
  return make_boundary_data(default_trig_spec());
}

struct Report {
  json checks = json::array();
  bool passed = true;
  void add(json check, bool ok) {
    check["passed"] = ok;
    checks.push_back(std::move(check));
    passed = passed && ok;
  }
};

void suite_kernels(const ProblemConfig& cfg, const Settings& s, Report& rep, json& grids) {
  const std::vector<cplx> lams = lambdas_from(s, "lambdas", sector_samples(cfg.sector));
  const std::vector<real> radii = linspace(s.get("r_min", 0.1), s.get("r_max", 5.0), s.get("r_count", 20));
  const real tol = s.get("tol", 1e-10);
  const real theta = 0.3;
  const Vec2 n_y{std::cos(1.1), std::sin(1.1)};
  for (const cplx& lam : lams) {
    const KernelContext ctx = KernelContext::make(cfg.coefficients, cfg.spectral(lam));
    for (KernelId id : kAllKernels) {
      real worst = 0.0;
      for (real r : radii)
        worst = std::max(worst, annihilation_residual(id, ctx, {r * std::cos(theta), r * std::sin(theta)}, n_y));
      rep.add({{"name", fmt::format("annihilation {} lambda=({:g},{:g})", to_string(id), lam.real(), lam.imag())},
               {"kernel", to_string(id)},
               {"lambda", to_json(lam)},
               {"max_residual", worst},
               {"tolerance", tol}},
              worst <= tol);
    }
  }
  json jl = json::array();
  for (const cplx& l : lams) jl.push_back(to_json(l));
  grids = {{"lambdas", jl}, {"radii", radii}};
}

void suite_decay(const ProblemConfig& cfg, const Settings& s, Report& rep, json& grids) {
  const std::vector<real> mods = s.get("moduli", std::vector<real>{8, 16, 32});
  const real lo = -pi / 4 + cfg.sector.delta + 1e-12, hi = pi / 4 - cfg.sector.delta;
  const std::vector<real> args = s.get("args", std::vector<real>{lo, 0.0, hi});
  const std::vector<real> radii = linspace(s.get("r_min", 0.05), s.get("r_max", 3.0), s.get("r_count", 60));
  std::vector<SpectralParameter> family;
  json jl = json::array();
  for (real m : mods)
    for (real a : args) {
      family.push_back(cfg.spectral(std::polar(m, a)));
      jl.push_back(to_json(family.back().lambda));
    }
  for (KernelId id : kAllKernels)
    for (int m = 0; m <= 2; ++m) {
      json c = {{"name", fmt::format("decay {} m={}", to_string(id), m)}, {"kernel", to_string(id)}, {"m", m}};
      try {
        const DecayFit f = verify_decay_bound(id, m, cfg.coefficients, family, radii);
        c.update({{"C", f.c}, {"eps", f.eps}, {"eps_min", f.eps_min}, {"margin", f.margin}});
        rep.add(c, f.margin >= 0.0 && f.eps > 0.0);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BoundViolated) throw;
        c["error"] = e.what();
        rep.add(c, false);
      }
    }
  grids = {{"lambdas", jl}, {"radii", radii}};
}

void suite_jumps(const ProblemConfig& cfg, const Settings& s, Report& rep, json& grids) {
  const cplx lam = s.j.contains("lambda") ? cplx_from(s.j["lambda"]) : cfg.lambda.value_or(16.0);
  const KernelContext ctx = KernelContext::make(cfg.coefficients, cfg.spectral(lam));
  const BoundaryCurve curve = make_curve(cfg.curve_kind, cfg.curve);
  CalibrationOptions opts;
  opts.target_t = s.get("target_t", opts.target_t);
  opts.tolerance = s.get("tolerance", opts.tolerance);
  opts.throw_on_mismatch = false;
  const real zero_tol = s.get("zero_tolerance", 1e-6);
  const JumpCalibration jc = calibrate_jumps(ctx, curve, opts);
  static const char* rows[3] = {"value", "normal", "normal_laplacian2"};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const bool zero = jc.zero_case[r][c];
      const real tol = zero ? zero_tol : opts.tolerance;
      rep.add({{"name", fmt::format("jump {} w{}", rows[r], c + 1)},
               {"analytic", to_json(jc.analytic[r][c])},
               {"measured", to_json(jc.measured[r][c])},
               {"deviation", jc.deviation[r][c]},
               {"zero_case", zero},
               {"tolerance", tol}},
              jc.deviation[r][c] <= tol);
    }
  grids = {{"lambda", to_json(lam)}, {"target_t", jc.target_t}, {"steps", jc.steps}};
}

void suite_analyticity(const ProblemConfig& cfg, const Settings& s, Report& rep, json& grids) {
  const cplx l0 = s.j.contains("center") ? cplx_from(s.j["center"]) : cplx(20.0);
  const real rho = s.get("radius", 2.0);
  const int m = s.get("points", 16);
  const int n = s.get("n_nodes", cfg.n_nodes);
  const std::vector<real> xp = s.get("x", std::vector<real>{0.3, 0.2});
  const real tol = s.get("tolerance", 1e-6);
  const BoundaryCurve curve = make_curve(cfg.curve_kind, cfg.curve);
  const AnalyticityResult res = analyticity_check(cfg.coefficients, curve, n, cfg.spectral(l0), rho, m,
                                                  suite_data(cfg), {xp[0], xp[1]}, cfg.solve_options());
  rep.add({{"name", "cauchy mean value"},
           {"center_value", to_json(res.center_value)},
           {"cauchy_mean", to_json(res.cauchy_mean)},
           {"defect", res.defect},
           {"tolerance", tol}},
          res.defect <= tol);
  grids = {{"center", to_json(l0)}, {"radius", rho}, {"points", m}, {"n_nodes", n}, {"x", xp}};
}

void suite_convergence(const ProblemConfig& cfg, const Settings& s, Report& rep, json& grids) {
  const cplx lam = s.j.contains("lambda") ? cplx_from(s.j["lambda"]) : cfg.lambda.value_or(16.0);
  const std::vector<int> ns = s.get("n_ladder", std::vector<int>{64, 128, 256});
  const int n_ref = s.get("n_reference", 512);
  const real min_ratio = s.get("min_ratio", 10.0);
  const real floor = s.get("error_floor", 1e-12);
  const BoundaryCurve curve = make_curve(cfg.curve_kind, cfg.curve);
  const BoundaryData data = suite_data(cfg);
  SolveOptions so = cfg.solve_options();
  // A fixed upsampling factor keeps the fine rule proportional to N.
  so.nystrom.upsample = s.get("upsample", so.nystrom.upsample > 0 ? so.nystrom.upsample : 4);

  auto solve = [&](int n, cplx l, SolveMethod method, SolveOptions o) {
    return solve_bvp(cfg.coefficients, curve, n, cfg.spectral(l), data, method, o);
  };
  const CVector ref = solve(n_ref, lam, SolveMethod::direct, so).densities().stacked();
  std::vector<real> errors;
  for (int n : ns) {
    if (n_ref % n != 0) throw Error(ErrorCode::ConfigInvalid, fmt::format("n_reference {} not a multiple of {}", n_ref, n));
    const CVector mu = solve(n, lam, SolveMethod::direct, so).densities().stacked();
    const int stride = n_ref / n;
    real e = 0.0, mx = 0.0;
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < n; ++i) {
        e = std::max(e, std::abs(mu[c * n + i] - ref[c * n_ref + i * stride]));
        mx = std::max(mx, std::abs(ref[c * n_ref + i * stride]));
      }
    errors.push_back(e / mx);
  }
  for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
    const real ratio = errors[k] / errors[k + 1];
    // Once the finer error reaches the floor the ratio carries no information.
    const bool ok = ratio >= min_ratio || errors[k + 1] <= floor;
    rep.add({{"name", fmt::format("density error ratio N={}->{}", ns[k], ns[k + 1])},
             {"error_coarse", errors[k]},
             {"error_fine", errors[k + 1]},
             {"ratio", ratio},
             {"min_ratio", min_ratio}},
            ok);
  }

  // Successive approximations against the direct solution.
  const std::vector<cplx> nl = lambdas_from(s, "neumann_lambdas", {16.0, 32.0, 64.0});
  const int n_neu = s.get("neumann_n_nodes", cfg.n_nodes);
  const real agree_tol = s.get("neumann_agreement", 1e-8);
  real previous = 2.0;
  for (const cplx& l : nl) {
    json c = {{"name", fmt::format("successive approximations lambda=({:g},{:g})", l.real(), l.imag())},
              {"lambda", to_json(l)},
              {"n_nodes", n_neu}};
    const KernelContext ctx = KernelContext::make(cfg.coefficients, cfg.spectral(l));
    const BoundarySystem sys = assemble_system(ctx, curve, n_neu, data, cfg.nystrom);
    NeumannReport nr;
    DirectReport dr;
    const CVector direct = solve_direct(sys, &dr).stacked();
    bool ok = false;
    try {
      const CVector it = solve_neumann(sys, cfg.tol, cfg.max_iter, &nr).stacked();
      const real agreement = (it - direct).norm() / direct.norm();
      c["agreement"] = agreement;
      ok = agreement <= agree_tol && nr.contraction < previous;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Divergence && e.code() != ErrorCode::MaxIterExceeded) throw;
      c["error"] = e.what();
    }
    c.update({{"iterations", nr.iterations}, {"contraction", nr.contraction}, {"converged", nr.converged}});
    previous = nr.contraction;
    rep.add(c, ok);
  }
  json jl = json::array();
  for (const cplx& l : nl) jl.push_back(to_json(l));
  grids = {{"lambda", to_json(lam)}, {"n_ladder", ns}, {"n_reference", n_ref}, {"upsample", so.nystrom.upsample},
           {"errors", errors}, {"neumann_lambdas", jl}, {"neumann_n_nodes", n_neu}};
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s = {"kernels", "decay", "jumps", "analyticity", "convergence"};
  return s;
}

Outcome run_verify(const std::string& suite, const ProblemConfig& cfg, const std::string& out_dir) {
  using Fn = void (*)(const ProblemConfig&, const Settings&, Report&, json&);
  Fn fn = nullptr;
  if (suite == "kernels") fn = suite_kernels;
  else if (suite == "decay") fn = suite_decay;
  else if (suite == "jumps") fn = suite_jumps;
  else if (suite == "analyticity") fn = suite_analyticity;
  else if (suite == "convergence") fn = suite_convergence;
  else return {kExitConfig, fmt::format("unknown suite '{}'", suite)};

  const json all = json::parse(cfg.verify_settings);
  const Settings settings{all.contains(suite) ? all[suite] : json::object()};
  Report rep;
  json grids = json::object();
  json out = {{"schema_version", 1}, {"suite", suite}};
  int code = kExitOk;
  std::string message;
  try {
    fn(cfg, settings, rep, grids);
    code = rep.passed ? kExitOk : kExitVerify;
    int failed = 0;
    for (const json& c : rep.checks) failed += c["passed"].get<bool>() ? 0 : 1;
    message = fmt::format("suite {}: {} of {} checks passed", suite, rep.checks.size() - failed, rep.checks.size());
  } catch (const json::exception& e) {
    code = kExitConfig;
    message = fmt::format("bad verify.{} settings: {}", suite, e.what());
    out["error"] = {{"code", "ConfigInvalid"}, {"message", message}};
  } catch (const Error& e) {
    code = exit_code(e.code());
    message = e.what();
    out["error"] = {{"code", std::string(to_string(e.code()))}, {"message", message}};
  }
  out["passed"] = code == kExitOk;
  out["checks"] = rep.checks;
  out["grids"] = grids;
  fs::create_directories(out_dir);
  write_atomic((fs::path(out_dir) / fmt::format("verify_{}.json", suite)).string(), dump(out));
  return {code, message};
}

}  // namespace sixbie::harness
