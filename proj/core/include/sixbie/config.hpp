#pragma once

// JSON problem configuration. Complex numbers are [re, im] pairs; missing
// fields take the defaults published in the configuration schema.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sixbie/boundary_solver.hpp"
#include "sixbie/geometry.hpp"
#include "sixbie/spectral.hpp"

namespace sixbie {

/// Trigonometric mode of a data function: c cos(k t) + s sin(k t).
struct TrigMode {
  int k = 0;
  cplx cos_coef{};
  cplx sin_coef{};
};

struct DataSpec {
  std::string family = "trig";  // zero | trig | manufactured
  /// λ-dependence a(λ) = λ_ref/(λ + λ_ref) on every mode when set.
  bool lambda_dependent = true;
  real lambda_ref = 1.0;
  std::array<std::vector<TrigMode>, 3> modes;
};

struct EvaluationGrid {
  std::vector<Vec2> points;
};

struct ProblemConfig {
  Coefficients coefficients;
  CurveKind curve_kind = CurveKind::ellipse;
  CurveParams curve;
  int n_nodes = 256;
  std::optional<cplx> lambda;
  std::vector<cplx> lambda_sweep;
  Sector sector;
  DataSpec data;
  SolveMethod method = SolveMethod::direct;
  real tol = 1e-10;
  int max_iter = 200;
  bool fallback_direct = false;
  NystromOptions nystrom;
  EvaluationGrid grid;
  std::string out_dir = "out";
  /// JSON text of the "verify" object (suite settings, all defaulted).
  std::string verify_settings = "{}";

  SpectralParameter spectral(cplx lam) const { return {lam, sector}; }
  SolveOptions solve_options() const;
};

/// Parses and validates a configuration document; throws ConfigInvalid
/// with every schema violation listed. Cross-field checks (even n, sweep
/// presence) are included; mathematical preconditions are not.
ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::string& path);

/// Boundary data for the zero and trig families; the manufactured family is
/// built by the harness from a reference discretisation.
BoundaryData make_boundary_data(const DataSpec& spec);

/// The trig family with its built-in modes.
DataSpec default_trig_spec();

}  // namespace sixbie
