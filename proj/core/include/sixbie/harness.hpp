#pragma once

// Batch front end: solves, λ-sweeps and verification suites driven by a
// ProblemConfig. Every run leaves its artifacts in an output directory,
// written atomically; nothing is printed except the returned message.

#include <string>
#include <vector>

#include "json.hpp"
#include "sixbie/config.hpp"
#include "sixbie/error.hpp"

namespace sixbie::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitSolver = 4;
inline constexpr int kExitVerify = 5;

int exit_code(ErrorCode code);

struct Outcome {
  int exit_code = kExitOk;
  std::string message;
};

/// Writes solution.csv, densities.csv and diagnostics.json, plus the
/// wall-clock sidecar timings.json. The first three depend on the config
/// only, so repeated runs reproduce them byte for byte.
Outcome run_solve(const ProblemConfig& cfg, const std::string& out_dir);

/// One solve per lambda_sweep entry under out_dir/lambda_<i>/, plus a
/// sweep.json summary. Solves run concurrently on SIXBIE_THREADS workers.
Outcome run_sweep(const ProblemConfig& cfg, const std::string& out_dir);

const std::vector<std::string>& verify_suites();

/// Writes out_dir/verify_<suite>.json; exit 5 when any check fails.
Outcome run_verify(const std::string& suite, const ProblemConfig& cfg, const std::string& out_dir);

/// Temp file in the same directory, then rename.
void write_atomic(const std::string& path, const std::string& content);

nlohmann::json to_json(cplx z);

/// Canonical text form of emitted JSON (2-space indent, trailing newline).
std::string dump(const nlohmann::json& j);

}  // namespace sixbie::harness
