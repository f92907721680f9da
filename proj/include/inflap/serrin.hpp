#pragma once

#include "inflap/geometry.hpp"
#include "inflap/grid.hpp"
#include "inflap/report.hpp"
#include "inflap/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace inflap {

enum class SerrinVerdict { consistent_web_domain, inconsistent, inconclusive };
std::string to_string(SerrinVerdict v);

/// Verdict thresholds. Calibrated at resolution 128 and scaled with h.
struct SerrinTolerances {
  double a_rel = 0.05;  // boundary-gradient spread and |a - (3 rho)^{1/3}| / a
  double p_rel = 0.05;  // P spread over mu

  static SerrinTolerances for_resolution(int resolution);
};

/// Deviation of u from the web function on nodes at least 2h inside, over mu.
struct WebAgreement {
  double linf = 0.0;
  double l2 = 0.0;
  int nodes = 0;
};

WebAgreement web_agreement(const ScalarField& u, const Domain& domain);

struct StadiumReconstruction {
  Stadium stadium;
  bool degenerate = false;  // the core segment collapsed to a point: a ball
  /// Hausdorff distance between the reconstructed boundary and the input one.
  double boundary_hausdorff = 0.0;
  int ridge_nodes = 0;
};

/// Principal-axis segment through the grid nodes of the high ridge (d within
/// h of rho), thickened by rho. Segments shorter than 2h count as a point.
/// Empty when the cut locus and the high ridge differ by more than 2h.
std::optional<StadiumReconstruction> stadium_reconstruct(const Grid& grid);

struct SerrinReport {
  std::string shape;
  int resolution = 0;
  double h = 0.0;
  double rho = 0.0;
  SerrinTolerances tolerances;

  bool solver_converged = false;
  int solver_iterations = 0;
  double solver_residual = 0.0;
  std::string solver_diagnostics;

  double mu = 0.0;
  double predicted_mu = 0.0;  // c0 rho^{4/3}
  double a = 0.0;             // mean boundary gradient
  double a_min = 0.0;
  double a_max = 0.0;
  double boundary_grad_relative_spread = 0.0;
  int boundary_samples = 0;
  int boundary_skipped = 0;
  double predicted_a = 0.0;  // (3 rho)^{1/3}
  double p_spread = 0.0;     // max P - min P over evaluated nodes
  WebAgreement web;

  bool cut_high_verdict = false;
  double cut_high_hausdorff = 0.0;
  DiametralBall diametral;

  std::vector<std::string> hypothesis_flags;
  std::string classification_note;
  std::optional<StadiumReconstruction> reconstruction;

  SerrinVerdict verdict = SerrinVerdict::inconclusive;
  std::vector<std::string> reasons;

  Json to_json() const;
};

/// Solves on a grid of the given resolution and diagnoses the result.
SerrinReport serrin_diagnose(const Domain& domain, int resolution, const SolverConfig& config,
                             const SerrinTolerances& tols);
/// Same on an existing solve.
SerrinReport serrin_diagnose(const Domain& domain, int resolution, const SolveResult& solve,
                             const SerrinTolerances& tols);

}  // namespace inflap
