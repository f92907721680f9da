#pragma once

#include "inflap/report.hpp"
#include "inflap/run_config.hpp"
#include "inflap/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace inflap {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitChecksFailed = 1,
  kExitConfig = 2,
  kExitNotConverged = 3,
  kExitInconclusive = 4,
};

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<int> resolution;
  std::optional<std::uint64_t> seed;
};

/// Loads the config file and applies the command-line overrides.
RunConfig resolve_config(const CommandOptions& opts);

/// Solution for a config: reused from u.iglfield when solve.json in the
/// output directory records the same domain, resolution and solver settings,
/// otherwise solved and written (u, d, P fields and solve.json).
struct Solution {
  SolveResult result;
  bool reused = false;
};
Solution obtain_solution(const RunConfig& cfg, std::ostream& log);

const std::vector<std::string>& verify_suites();
/// Runs one suite ({concavity, pbounds, supconv, flow, holder, all}) on a
/// solved field. "all" runs the suites enabled in the config. Throws
/// ConfigurationError for an unknown suite.
std::vector<Check> run_verify_suite(const RunConfig& cfg, const ScalarField& u, const std::string& suite);

int cmd_solve(const CommandOptions& opts, std::ostream& log);
int cmd_verify(const CommandOptions& opts, const std::string& suite, std::ostream& log);
int cmd_serrin(const CommandOptions& opts, std::ostream& log);
/// Empty `starts` uses the starts of the config.
int cmd_flow(const CommandOptions& opts, const std::vector<Vec2>& starts, std::ostream& log);
int cmd_geometry(const CommandOptions& opts, std::ostream& log);

}  // namespace inflap
