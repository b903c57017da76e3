#include "sixbie/harness.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>

#include <fmt/format.h>

#include "sixbie/boundary_solver.hpp"
#include "sixbie/geometry.hpp"
#include "sixbie/kernels.hpp"
#include "sixbie/parallel.hpp"
#include "sixbie/schema.hpp"

namespace sixbie::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

real seconds_since(Clock::time_point t0) { return std::chrono::duration<real>(Clock::now() - t0).count(); }

constexpr const char* kJumpConvention =
    "interior limit minus principal value; inward normal; rows (value, d/dn, d/dn laplacian^2), columns (w1, w2, w3)";

std::string num(real x) { return fmt::format("{:.17g}", x); }

json jump_json(const JumpTable& t) {
  json rows = json::array();
  for (const auto& row : t) {
    json r = json::array();
    for (const cplx& z : row) r.push_back(to_json(z));
    rows.push_back(r);
  }
  return rows;
}

struct SolveArtifacts {
  json diagnostics;
  json timings;
  std::string solution_csv;
  std::string densities_csv;
  int exit_code = kExitOk;
  std::string message;
  real density_max = 0.0;
};

SolveArtifacts solve_once(const ProblemConfig& cfg, cplx lam, int threads) {
  SolveArtifacts a;
  const auto t_start = Clock::now();
  json& d = a.diagnostics;
  d["schema_version"] = 1;
  d["status"] = "ok";
  d["lambda"] = to_json(lam);
  d["n_nodes"] = cfg.n_nodes;
  d["method"] = to_string(cfg.method);
  try {
    const KernelContext ctx = KernelContext::make(cfg.coefficients, cfg.spectral(lam));
    d["coefficients"] = {{"a0", to_json(cfg.coefficients.a0)},
                         {"a1", to_json(cfg.coefficients.a1)},
                         {"a2", to_json(cfg.coefficients.a2)}};
    json roots = json::array(), kappa = json::array();
    for (int k = 0; k < 3; ++k) {
      roots.push_back(to_json(ctx.roots.nu[k]));
      kappa.push_back(to_json(ctx.kappa[k]));
    }
    d["roots"] = roots;
    d["kappa"] = kappa;

    const BoundaryCurve curve = make_curve(cfg.curve_kind, cfg.curve);
    SolveOptions so = cfg.solve_options();
    so.nystrom.threads = threads;

    const auto t_setup = Clock::now();
    std::optional<ManufacturedProblem> mp;
    BoundaryData data;
    if (cfg.data.family == "manufactured") {
      mp = make_manufactured(ctx, curve, cfg.n_nodes, so.nystrom);
      data = mp->data;
    } else {
      data = make_boundary_data(cfg.data);
    }
    a.timings["boundary_data_s"] = seconds_since(t_setup);

    const auto t_solve = Clock::now();
    const Solution sol = solve_bvp(cfg.coefficients, curve, cfg.n_nodes, cfg.spectral(lam), data, cfg.method, so);
    a.timings["solve_s"] = seconds_since(t_solve);
    const SolveDiagnostics& sd = sol.diagnostics();
    const NystromAssembler& as = sol.assembler();

    d["method"] = to_string(sd.method);
    d["upsample"] = as.upsample();
    d["fine_nodes"] = as.fine_n();
    d["jump_table"] = jump_json(as.jumps());
    d["jump_convention"] = kJumpConvention;
    if (cfg.method == SolveMethod::neumann) {
      d["iterations"] = sd.neumann.iterations;
      d["contraction"] = sd.neumann.contraction;
      d["converged"] = sd.neumann.converged;
    }
    if (sd.method == SolveMethod::direct) d["direct"] = {{"residual", sd.direct.residual}, {"rcond", sd.direct.rcond}};

    const auto t_eval = Clock::now();
    std::vector<Vec2> inside;
    std::string csv = "x1,x2,re_u,im_u\n";
    int skipped = 0;
    for (const Vec2& x : cfg.grid.points) {
      try {
        const cplx u = sol.evaluate(x);
        inside.push_back(x);
        csv += fmt::format("{},{},{},{}\n", num(x.x), num(x.y), num(u.real()), num(u.imag()));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TooCloseToBoundary && e.code() != ErrorCode::DomainError) throw;
        ++skipped;
        csv += fmt::format("{},{},nan,nan\n", num(x.x), num(x.y));
      }
    }
    a.solution_csv = std::move(csv);

    json residuals;
    residuals["pde"] = inside.empty() ? 0.0 : residual_pde(sol, inside);
    residuals["boundary_reproduction"] = sd.boundary_reproduction;
    if (mp) {
      const CVector planted = mp->planted.stacked();
      const real denom = planted.norm();
      residuals["density_recovery_error"] = denom > 0.0 ? (sol.densities().stacked() - planted).norm() / denom : 0.0;
    }
    a.timings["evaluation_s"] = seconds_since(t_eval);
    d["residuals"] = residuals;
    d["data_fourier_tail"] = sd.data_fourier_tail;
    d["lyapunov_exponent"] = sd.lyapunov;
    d["grid_points"] = static_cast<int>(cfg.grid.points.size());
    d["skipped_points"] = skipped;
    d["warnings"] = sd.warnings;
    if (skipped > 0)
      d["warnings"].push_back(fmt::format("{} grid points outside D or within the clearance band", skipped));

    const DensityTriple& mu = sol.densities();
    const QuadratureNodes& nodes = as.nodes();
    std::string dcsv = "t,index,re_mu1,im_mu1,re_mu2,im_mu2,re_mu3,im_mu3\n";
    for (int i = 0; i < cfg.n_nodes; ++i) {
      dcsv += fmt::format("{},{},{},{},{},{},{},{}\n", num(nodes.params[i]), i, num(mu.mu1[i].real()),
                          num(mu.mu1[i].imag()), num(mu.mu2[i].real()), num(mu.mu2[i].imag()),
                          num(mu.mu3[i].real()), num(mu.mu3[i].imag()));
      a.density_max = std::max({a.density_max, std::abs(mu.mu1[i]), std::abs(mu.mu2[i]), std::abs(mu.mu3[i])});
    }
    a.densities_csv = std::move(dcsv);
  } catch (const Error& e) {
    a.exit_code = exit_code(e.code());
    a.message = e.what();
    d["status"] = "error";
    d["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  }
  a.timings["total_s"] = seconds_since(t_start);
  return a;
}

Outcome write_solve(const SolveArtifacts& a, const fs::path& dir) {
  const std::vector<std::string> problems = schema::validate(a.diagnostics, schema::diagnostics_schema());
  if (!problems.empty()) return {kExitInternal, "diagnostics failed schema validation: " + problems.front()};
  fs::create_directories(dir);
  if (a.exit_code == kExitOk) {
    write_atomic((dir / "solution.csv").string(), a.solution_csv);
    write_atomic((dir / "densities.csv").string(), a.densities_csv);
  }
  write_atomic((dir / "diagnostics.json").string(), dump(a.diagnostics));
  write_atomic((dir / "timings.json").string(), dump(a.timings));
  return {a.exit_code, a.exit_code == kExitOk ? fmt::format("wrote {}", dir.string()) : a.message};
}

}  // namespace

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidArgument:
      return kExitConfig;
    case ErrorCode::NonDistinctRoots:
    case ErrorCode::SectorConditionViolated:
    case ErrorCode::ZeroRoot:
    case ErrorCode::DomainError:
    case ErrorCode::IrregularCurve:
    case ErrorCode::SelfIntersection:
    case ErrorCode::MissingNormal:
    case ErrorCode::SingularPoint:
    case ErrorCode::TooCloseToBoundary:
      return kExitPrecondition;
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::SingularJump:
    case ErrorCode::Divergence:
    case ErrorCode::MaxIterExceeded:
    case ErrorCode::NearSingularSystem:
    case ErrorCode::CalibrationMismatch:
      return kExitSolver;
    case ErrorCode::BoundViolated:
      return kExitVerify;
  }
  return kExitInternal;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, fmt::format("cannot write '{}'", tmp.string()));
    out << content;
    if (!out.flush()) throw Error(ErrorCode::InvalidArgument, fmt::format("short write to '{}'", tmp.string()));
  }
  fs::rename(tmp, target);
}

Outcome run_solve(const ProblemConfig& cfg, const std::string& out_dir) {
  if (!cfg.lambda) return {kExitConfig, "solve needs 'lambda'; use sweep for 'lambda_sweep'"};
  return write_solve(solve_once(cfg, *cfg.lambda, 0), out_dir);
}

Outcome run_sweep(const ProblemConfig& cfg, const std::string& out_dir) {
  if (cfg.lambda_sweep.empty()) return {kExitConfig, "sweep needs a non-empty 'lambda_sweep'"};
  const int count = static_cast<int>(cfg.lambda_sweep.size());
  const int workers = std::min(resolve_threads(0), count);
  // Sweep-level parallelism replaces row-level parallelism inside each solve.
  const int inner = workers > 1 ? 1 : 0;
  std::vector<SolveArtifacts> runs(count);
  parallel_for(count, workers, [&](int, int i) { runs[i] = solve_once(cfg, cfg.lambda_sweep[i], inner); });

  json summary = {{"schema_version", 1}, {"entries", json::array()}};
  int worst = kExitOk;
  std::string first_error;
  for (int i = 0; i < count; ++i) {
    const std::string sub = fmt::format("lambda_{}", i);
    const Outcome o = write_solve(runs[i], fs::path(out_dir) / sub);
    json e = {{"lambda", to_json(cfg.lambda_sweep[i])},
              {"dir", sub},
              {"exit_code", o.exit_code},
              {"status", runs[i].diagnostics["status"]}};
    if (o.exit_code == kExitOk) e["density_max_abs"] = runs[i].density_max;
    else if (first_error.empty()) first_error = fmt::format("lambda_{}: {}", i, o.message);
    summary["entries"].push_back(e);
    worst = std::max(worst, o.exit_code);
  }
  write_atomic((fs::path(out_dir) / "sweep.json").string(), dump(summary));
  return {worst, worst == kExitOk ? fmt::format("wrote {} solves under {}", count, out_dir) : first_error};
}

}  // namespace sixbie::harness
