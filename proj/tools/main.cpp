// sixbie: batch runner for the sixth-order boundary-value problem.
//
//   sixbie solve  --config <path> [--out <dir>]
//   sixbie verify --suite <name> --config <path> [--out <dir>]
//   sixbie sweep  --config <path> [--out <dir>]
//
// Exit codes: 0 ok, 2 config invalid, 3 mathematical precondition violated,
// 4 solver failure, 5 verification failure, 1 anything else.

#include <cstdio>
#include <exception>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sixbie/config.hpp"
#include "sixbie/harness.hpp"

namespace {

using namespace sixbie;

int finish(const harness::Outcome& o) {
  std::FILE* stream = o.exit_code == harness::kExitOk ? stdout : stderr;
  if (!o.message.empty()) fmt::print(stream, "{}\n", o.message);
  return o.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary integral solver for A0Δ³u + A1λ²Δ²u + A2λ⁴Δu + λ⁶u = 0"};
  app.require_subcommand(1);
  std::string config_path, out_dir, suite;

  CLI::App* solve = app.add_subcommand("solve", "Solve at the configured lambda");
  solve->add_option("--config", config_path, "Problem configuration (JSON)")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out_dir, "Output directory (overrides output.dir)");

  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("--suite", suite, "Suite name")->required()->check(CLI::IsMember(harness::verify_suites()));
  verify->add_option("--config", config_path, "Problem configuration (JSON)")->required()->check(CLI::ExistingFile);
  verify->add_option("--out", out_dir, "Output directory (overrides output.dir)");

  CLI::App* sweep = app.add_subcommand("sweep", "Solve at every lambda_sweep entry");
  sweep->add_option("--config", config_path, "Problem configuration (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output directory (overrides output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : harness::kExitConfig;
  }

  try {
    const ProblemConfig cfg = load_config(config_path);
    const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
    if (*solve) return finish(harness::run_solve(cfg, dir));
    if (*verify) return finish(harness::run_verify(suite, cfg, dir));
    return finish(harness::run_sweep(cfg, dir));
  } catch (const Error& e) {
    fmt::print(stderr, "{}: {}\n", to_string(e.code()), e.what());
    return harness::exit_code(e.code());
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return harness::kExitInternal;
  }
}
