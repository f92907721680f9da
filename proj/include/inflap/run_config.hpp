#pragma once

#include "inflap/geometry.hpp"
#include "inflap/report.hpp"
#include "inflap/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace inflap {

/// {"shape": "ball", "center": [x, y], "radius": r}
/// {"shape": "stadium", "a": [x, y], "b": [x, y], "radius": r}
/// {"shape": "ellipse", "center": [x, y], "semi_a": a, "semi_b": b}
/// {"shape": "polygon", "vertices": [[x, y], ...]}
Domain domain_from_json(const Json& j);
Json domain_to_json(const Domain& domain);

/// Numbers or "auto" for the optional fields.
SolverConfig solver_config_from_json(const Json& j);
Json solver_config_to_json(const SolverConfig& c);

struct AnalysisToggles {
  bool pbounds = true;
  bool concavity = true;
  bool flow = true;
  bool supconv = true;
  bool holder = true;
};

struct FlowSettings {
  int count = 32;
  /// Starts sit this fraction of rho inside the boundary, along the inward normal.
  double inset = 0.01;
  /// Explicit starts; when present they replace the boundary ring.
  std::vector<Vec2> starts;
};

struct RunConfig {
  Domain domain = Domain::ball(Vec2::Zero(), 1.0);
  int resolution = 128;
  SolverConfig solver;
  AnalysisToggles analysis;
  bool serrin = true;
  FlowSettings flow;
  int concavity_samples = 10000;
  std::filesystem::path output_dir = "out";
  std::uint64_t rng_seed = 42;

  /// Flow starts: the explicit list, or `count` boundary points moved inward.
  std::vector<Vec2> flow_starts() const;
  Json to_json() const;
};

/// Throws ConfigurationError on unknown keys, wrong types or invalid values.
RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace inflap
