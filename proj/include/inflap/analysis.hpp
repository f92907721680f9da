#pragma once

#include "inflap/grid.hpp"
#include "inflap/report.hpp"
#include "inflap/solver.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace inflap {

/// P = |grad u|^4/4 + u.
struct PField {
  ScalarField values;
  /// Nodes at least 2h from the boundary, where the gradient stencil is trusted.
  std::vector<std::uint8_t> evaluated;
  double min_boundary_quarter_grad = 0.0;
  double max_u = 0.0;  // mu
  BoundaryGradient boundary;
};

PField p_function(const ScalarField& u, const Domain& domain);

/// min_bdry |grad u|^4/4 - tol <= P <= mu + tol on every evaluated node.
Check check_p_bounds(const PField& p, double tol);

/// max |grad u| over inside nodes.
double lipschitz_estimate(const ScalarField& u);

enum class FlowEnd { reached_max_set, left_domain, step_limit, gradient_below_tol };
std::string to_string(FlowEnd end);

struct FlowSample {
  double t;
  Vec2 point;
  double u;
  double grad_norm;
  double P;
};

struct Trajectory {
  std::vector<FlowSample> samples;
  Vec2 start = Vec2::Zero();
  FlowEnd terminated = FlowEnd::step_limit;

  double arrival_time() const { return samples.empty() ? 0.0 : samples.back().t; }
};

/// Interpolated u and grad u, built once and shared by many trajectories.
class FlowField {
 public:
  explicit FlowField(const ScalarField& u);

  const ScalarField& field() const { return u_; }
  double max_u() const { return mu_; }
  double lipschitz() const { return lip_; }
  /// h / (2 Lip).
  double default_step() const;
  /// Gradient scale below which the flow counts as arrived: h^{1/3}/5.
  double default_grad_tol() const;

  bool sample(const Vec2& p, double& u, Vec2& grad) const;

 private:
  ScalarField u_;
  FieldSampler fu_;
  VectorSampler fg_;
  double mu_;
  double lip_;
};

/// RK4 integration of x' = grad u(x) with a fixed step. Stops when |grad u| <=
/// grad_tol, when u would decrease (the interpolated field has no finer
/// structure left to follow), when the path leaves the reconstructed band, or
/// once t > t_max. Throws InvalidStart outside the domain or at a critical
/// point.
Trajectory gradient_flow(const FlowField& flow, const Vec2& start, double step, double grad_tol,
                         double t_max);
Trajectory gradient_flow(const ScalarField& u, const Vec2& start, double step, double grad_tol,
                         double t_max);

/// P drift along the path and the deviation of u(gamma(t)) from
/// lambda - (sqrt(lambda - m) - t)^2 with lambda = P(gamma(0)), m = u(gamma(0)).
/// The report also carries the least-squares lambda for reference.
Check check_p_along_flow(const Trajectory& traj, double tol);

/// CSV with header t,x,y,u,gradnorm,P and 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

struct SupConvolution {
  double epsilon = 0.0;
  ScalarField u_eps;
  std::vector<std::uint8_t> U_eps_mask;      // u > eps
  std::vector<std::uint8_t> A_eps_mask;      // U_eps at distance > eps R from its boundary
  std::vector<std::uint8_t> Omega_eps_mask;  // A_eps with u_eps > m_eps
  double m_eps = 0.0;                        // max of u_eps on the boundary of A_eps
  double R = 0.0;                            // 2 Lip(u)
  double lipschitz = 0.0;
};

/// u_eps(x) = max over inside nodes y of u(y) - |x - y|^2 / (2 eps), computed
/// exactly with two one-dimensional lower-envelope passes. Requires
/// 0 < eps < rho / (4R).
SupConvolution sup_convolution(const ScalarField& u, double epsilon);

/// For every rung: second differences of u_eps on Omega_eps (axes and
/// diagonals) lie in [-(1 + 0.05)/eps, 2C/(2 - eps C) + tol]. Across the
/// ladder (ordered from the largest eps): max |u_eps - u| and
/// max |grad u_eps - grad u| strictly decrease, and u_eps >= u everywhere.
std::vector<Check> check_sup_convolution_regularity(std::span<const SupConvolution> ladder,
                                                    const ScalarField& u);

/// Flows of u_eps from `count` points on the boundary of Omega_eps; P_eps may
/// not drop by more than tol along any of them.
Check check_p_eps_monotone(const SupConvolution& sc, int count, double tol);

struct HolderFit {
  double alpha = 0.0;
  double band = 0.0;  // two standard errors of the slope
  std::vector<double> radii;
  std::vector<double> grad_max;
  int max_set_nodes = 0;
};

/// Slope of log max{|grad u(x)| : dist(x, K) <= r} against log r, K being the
/// nodes with u >= mu - c0 h^{4/3} / 2. Radii beyond rho/2 are dropped;
/// fewer than three left throws InsufficientData.
HolderFit holder_exponent_near_max(const ScalarField& u, const PField& p,
                                   std::span<const double> fit_radii);

/// {4, 6, 8, 12, 16, 24, 32} h.
std::vector<double> default_holder_radii(double h);

}  // namespace inflap
