#pragma once

#include "inflap/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace inflap {

struct SolverConfig {
  double residual_tol = 1e-4;  // max-norm of |Delta_inf u + 1| away from the boundary
  int max_iters = 500000;      // pseudo-time steps
  double pseudo_dt_safety = 0.5;
  /// Slope scale below which a node counts as degenerate (pseudo-time floor
  /// and diagnostics); empty means h^{1/3}/10.
  std::optional<double> degenerate_gradient_tol;
  /// Radius of the max/min stencil circle in units of h. Empty means
  /// sqrt(2) (rho / h)^{1/4} clamped to [2, 16], so the radius itself shrinks
  /// like h^{3/4}. The scheme averages this circle with one sqrt(2) smaller
  /// and reads the endpoints by bicubic interpolation.
  std::optional<double> stencil_radius;

  double degenerate_tol(double h) const;
  double stencil_radius_for(const Grid& grid) const;
  /// Throws ConfigurationError on out-of-range values.
  void validate() const;
};

struct SolveResult {
  ScalarField u;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  int degenerate_nodes = 0;
  std::string diagnostics;
};

/// Discrete non-normalised infinity Laplacian at an inside node:
///   2 (S+^3 - S-^3) / (3 (a- + c a+)),
/// with S- the steepest descent slope to points on the circle of radius eps
/// around the node and S+ the slope of the ascent sample that maximises the
/// expression. a+- are the step lengths (shorter where the circle leaves the
/// domain, u = 0 there). c = 1 for ordinary ascents; a weak ascent well off
/// every near-steepest descent (near a ridge or the maximum) counts with
/// c < 1, the descents weighted by how close they come to S-. For
/// smooth u with p != 0 this is |p|^2 u_ee + O(eps, (h/eps)^2).
double discrete_infinity_laplacian(const ScalarField& u, int node, const SolverConfig& config);

/// Viscosity solution of -Delta_inf u = 1 in the domain, u = 0 on the boundary.
SolveResult solve_dirichlet(const Domain& domain, GridPtr grid, const SolverConfig& config);

/// |Delta_h u + 1| per node; NaN outside and within 2h of the boundary.
ScalarField residual_field(const ScalarField& u, const SolverConfig& config);

struct BoundaryGradientSample {
  Vec2 point;
  double grad_norm;
};

struct BoundaryGradient {
  std::vector<BoundaryGradientSample> samples;
  int skipped = 0;

  double mean() const;
  double min() const;
  double max() const;
  /// (max - min) / mean.
  double relative_spread() const;
};

/// One-sided estimate of |grad u| along the inward normal at equally spaced
/// boundary points, from u at distances h, 2h, 3h and u = 0 on the boundary.
BoundaryGradient boundary_gradient(const ScalarField& u, const Domain& domain, int sample_count);

/// Samples of the web function on the inside nodes of a grid.
ScalarField web_field(GridPtr grid);

}  // namespace inflap
