#include "inflap/solver.hpp"

#include "inflap/errors.hpp"
#include "inflap/parallel.hpp"

#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace inflap {

namespace {

constexpr int kDirections = 64;  // even: direction d + 32 is opposite to d
constexpr double kMinArm = 1e-2;  // in units of h
constexpr double kFullSpanCos = 0.95;
constexpr double kNearDescent = 0.02;  // relative slope margin of the descents an ascent may oppose
constexpr double kWeakAscent = 0.5;  // ascent/descent slope ratio below which the ascent is projected

using Weights = std::vector<std::pair<int, double>>;

struct StencilRow {
  double value = 0.0;  // discrete operator
  double s_plus = 0.0;
  double s_minus = 0.0;
  double a_plus = 0.0;
  double a_minus = 0.0;
  double span = 0.0;  // distance between the two slope sample points, doubled
  double d_plus = 0.0;   // d value / d s_plus
  double d_minus = 0.0;  // d value / d s_minus
  Weights w_plus;  // endpoint weights, empty when the endpoint is on the boundary
  Weights w_minus;

  double slope_sq() const { return (s_plus * s_plus + s_plus * s_minus + s_minus * s_minus) / 3.0; }
};

/// Max/min stencil on a circle of radius eps, truncated at the boundary.
class Scheme {
 public:
  Scheme(const Grid& g, double eps) : g_(g), eps_(eps) {
    for (int d = 0; d < kDirections; ++d) {
      const double t = 2.0 * std::numbers::pi * d / kDirections;
      dirs_[d] = Vec2(std::cos(t), std::sin(t));
    }
    ghost_of_.assign(g.size(), -1);
    for (std::size_t q = 0; q < g.ghosts().size(); ++q) ghost_of_[g.ghosts()[q].node] = static_cast<int>(q);
    // Step lengths for nodes whose circle leaves the domain.
    const Domain& dom = g.domain();
    for (int k = 0; k < g.size(); ++k) {
      if (!g.inside(k) || g.signed_distance(k) >= eps_) continue;
      std::array<double, kDirections> arms;
      const Vec2 x = g.node(k);
      for (int d = 0; d < kDirections; ++d) {
        const Vec2 v = dirs_[d];
        const double end = dom.signed_distance(x + eps_ * v);
        if (end > 0.0) {
          arms[d] = eps_;
          continue;
        }
        auto f = [&](double t) { return dom.signed_distance(x + t * v); };
        boost::uintmax_t iters = 200;
        const double tol = 1e-10 * g.h();
        auto stop = [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; };
        const auto r = boost::math::tools::toms748_solve(f, 0.0, eps_, g.signed_distance(k), end, stop, iters);
        arms[d] = std::max(0.5 * (r.first + r.second), kMinArm * g.h());
      }
      arms_.emplace(k, arms);
    }
  }

  double eps() const { return eps_; }

  /// Row at node k for DirichletZero-extended values `ext`.
  StencilRow row(int k, const std::vector<double>& ext, bool with_weights) const {
    const Vec2 x = g_.node(k);
    const auto it = arms_.find(k);
    const std::array<double, kDirections>* arms = it == arms_.end() ? nullptr : &it->second;
    const double uk = ext[k];
    std::array<double, kDirections> slope, arm;
    for (int d = 0; d < kDirections; ++d) {
      arm[d] = arms ? (*arms)[d] : eps_;
      const double v = arm[d] < eps_ ? 0.0 : interpolate(ext, x + eps_ * dirs_[d]);
      slope[d] = (v - uk) / arm[d];
    }
    int dm = 0;
    for (int d = 1; d < kDirections; ++d) {
      if (slope[d] < slope[dm]) dm = d;  // lowest index wins ties
    }
    const double sm = -slope[dm];
    // Every descent within kNearDescent * S- of the steepest one counts, with a
    // weight that fades to zero at that margin. The full-span factor of an
    // ascent sample is its best weighted alignment with one of them, so the
    // row stays continuous when two separated descents swap as the argmin.
    std::array<double, kDirections> full;
    full.fill(0.0);
    const double margin = kNearDescent * sm;
    for (int e = 0; e < kDirections; ++e) {
      const double gap = slope[e] - slope[dm];
      const double w = margin > 0.0 ? 1.0 - gap / margin : (e == dm ? 1.0 : 0.0);
      if (w <= 0.0) continue;
      for (int d = 0; d < kDirections; ++d) {
        full[d] = std::max(full[d], w * full_span(-dirs_[d].dot(dirs_[e])));
      }
    }
    // Pair the steepest descent with the ascent sample d that maximises the
    // row. A sample well off the descent line (across or along a ridge)
    // counts at its projection onto that line, near the node rather than a
    // full step beyond it; at an isolated maximum this favours the opposite
    // direction. Taking the max keeps the row continuous in the data.
    int dp = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < kDirections; ++d) {
      const double span = arm[dm] + projection(slope[d], sm, full[d]).c * arm[d];
      const double g = (slope[d] * slope[d] * slope[d] - sm * sm * sm) / span;
      if (g > best) {
        best = g;
        dp = d;
      }
    }
    StencilRow r;
    r.s_plus = slope[dp];
    r.s_minus = sm;
    r.a_plus = arm[dp];
    r.a_minus = arm[dm];
    const Projection pr = projection(r.s_plus, sm, full[dp]);
    r.span = r.a_minus + pr.c * r.a_plus;
    const double num = 2.0 * (std::pow(r.s_plus, 3) - std::pow(r.s_minus, 3)) / 3.0;
    r.value = num / r.span;
    r.d_plus = (2.0 * r.s_plus * r.s_plus - r.value * pr.dc_plus * r.a_plus) / r.span;
    r.d_minus = (-2.0 * r.s_minus * r.s_minus - r.value * pr.dc_minus * r.a_plus) / r.span;
    if (with_weights) {
      if (r.a_plus >= eps_) endpoint_weights(x + eps_ * dirs_[dp], ext, r.w_plus);
      if (r.a_minus >= eps_) endpoint_weights(x + eps_ * dirs_[dm], ext, r.w_minus);
    }
    return r;
  }

  /// Weight of the ascent arm in the span, and its derivatives in s_plus
  /// and s_minus. Only weak ascents (near a ridge or a maximum) are
  /// projected; the weight grows with s_plus, so the row stays monotone.
  struct Projection {
    double c, dc_plus, dc_minus;
  };
  /// Full weight near the opposite direction, so that small wobbles of the
  /// argmax in smooth regions do not change the row. `opposite` is minus the
  /// cosine between the ascent and descent directions.
  static double full_span(double opposite) {
    const double q = std::max(0.0, opposite) / kFullSpanCos;
    return std::min(1.0, q * q * q * q);
  }
  static Projection projection(double s_plus, double s_minus, double full) {
    const double gap = 1.0 - full;
    if (!(s_minus > 0.0)) return {1.0, 0.0, 0.0};  // no descent: nothing to project onto
    const double t = s_plus / (kWeakAscent * s_minus);
    if (t <= 0.0) return {full, 0.0, 0.0};
    if (t >= 1.0) return {1.0, 0.0, 0.0};
    return {1.0 - (1.0 - t) * gap, gap / (kWeakAscent * s_minus), -gap * t / s_minus};
  }

  /// Jacobian of the row with respect to inside node values (argmax fixed).
  void linearise(const StencilRow& r, int k, Weights& jac) const {
    jac.clear();
    // s_plus = (v+ - u)/a+, s_minus = (u - v-)/a-.
    const double dp = r.d_plus / r.a_plus;
    const double dm = -r.d_minus / r.a_minus;
    for (const auto& [m, w] : r.w_plus) jac.emplace_back(m, dp * w);
    for (const auto& [m, w] : r.w_minus) jac.emplace_back(m, dm * w);
    jac.emplace_back(k, -(dp + dm));
  }

 private:
  // Endpoint interpolation: Catmull-Rom bicubic (exact on quadratics) when
  // the 4x4 block is defined, bilinear otherwise. Bilinear alone is biased by
  // about h^2/8 |Laplacian| on concave data, a few percent of the row at the
  // radii used here.
  struct Cell {
    std::array<int, 16> idx;
    std::array<double, 16> w;
    int n = 0;
  };

  static std::array<double, 4> keys(double f) {
    const double f2 = f * f, f3 = f2 * f;
    return {-0.5 * f3 + f2 - 0.5 * f, 1.5 * f3 - 2.5 * f2 + 1.0, -1.5 * f3 + 2.0 * f2 + 0.5 * f,
            0.5 * f3 - 0.5 * f2};
  }

  Cell locate(const Vec2& p, const std::vector<double>* ext) const {
    const double gx = (p.x() - g_.origin().x()) / g_.h();
    const double gy = (p.y() - g_.origin().y()) / g_.h();
    const int i0 = std::clamp(static_cast<int>(std::floor(gx)), 0, g_.nx() - 2);
    const int j0 = std::clamp(static_cast<int>(std::floor(gy)), 0, g_.ny() - 2);
    const double fx = gx - i0, fy = gy - j0;
    const int nx = g_.nx();
    Cell c;
    if (i0 >= 1 && j0 >= 1 && i0 + 2 < nx && j0 + 2 < g_.ny()) {
      bool defined = true;
      for (int b = -1; b <= 2 && defined; ++b) {
        for (int a = -1; a <= 2; ++a) {
          const int k = g_.index(i0 + a, j0 + b);
          if (ext ? !std::isfinite((*ext)[k]) : !(g_.inside(k) || ghost_of_[k] >= 0)) {
            defined = false;
            break;
          }
        }
      }
      if (defined) {
        const auto wx = keys(fx), wy = keys(fy);
        for (int b = 0; b < 4; ++b) {
          for (int a = 0; a < 4; ++a) {
            c.idx[c.n] = g_.index(i0 + a - 1, j0 + b - 1);
            c.w[c.n++] = wx[a] * wy[b];
          }
        }
        return c;
      }
    }
    const int k00 = g_.index(i0, j0);
    c.idx = {k00, k00 + 1, k00 + nx, k00 + nx + 1};
    c.w = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    c.n = 4;
    return c;
  }

  double interpolate(const std::vector<double>& ext, const Vec2& p) const {
    const Cell c = locate(p, &ext);
    double v = 0.0;
    for (int q = 0; q < c.n; ++q) {
      if (c.w[q] != 0.0) v += c.w[q] * ext[c.idx[q]];
    }
    return v;
  }

  void endpoint_weights(const Vec2& p, const std::vector<double>& ext, Weights& out) const {
    const Cell c = locate(p, &ext);
    for (int q = 0; q < c.n; ++q) {
      if (c.w[q] == 0.0) continue;
      const int k = c.idx[q];
      if (g_.inside(k)) {
        out.emplace_back(k, c.w[q]);
      } else if (ghost_of_[k] >= 0) {
        for (const auto& [m, w] : g_.ghosts()[ghost_of_[k]].dirichlet) out.emplace_back(m, c.w[q] * w);
      }
    }
  }

  const Grid& g_;
  double eps_;
  std::array<Vec2, kDirections> dirs_;
  std::vector<int> ghost_of_;
  std::unordered_map<int, std::array<double, kDirections>> arms_;
};

/// Mean of the circle scheme at radius eps and at an incommensurate inner
/// radius. A perturbation with period eps along the gradient lines is
/// invisible to one circle (every arm lands on the same phase); near a
/// maximum such waves are excited and then barely damped. The second radius
/// removes that null mode.
class TwoScale {
 public:
  struct Row {
    StencilRow outer, inner;
    double value() const { return 0.5 * (outer.value + inner.value); }
    double slope_sq() const { return 0.5 * (outer.slope_sq() + inner.slope_sq()); }
  };

  TwoScale(const Grid& g, double eps)
      : outer_(g, eps), inner_(g, eps / std::numbers::sqrt2) {}

  double eps() const { return outer_.eps(); }
  double inner_eps() const { return inner_.eps(); }

  Row row(int k, const std::vector<double>& ext, bool with_weights) const {
    return {outer_.row(k, ext, with_weights), inner_.row(k, ext, with_weights)};
  }

  void linearise(const Row& r, int k, Weights& jac) const {
    jac.clear();
    Weights part;
    outer_.linearise(r.outer, k, part);
    for (const auto& [m, w] : part) jac.emplace_back(m, 0.5 * w);
    inner_.linearise(r.inner, k, part);
    for (const auto& [m, w] : part) jac.emplace_back(m, 0.5 * w);
  }

 private:
  Scheme outer_;
  Scheme inner_;
};

std::vector<double> dirichlet_extension(const ScalarField& u) {
  ScalarField ud = u;
  ud.extension = Extension::DirichletZero;
  return extended_values(ud);
}

}  // namespace

double SolverConfig::degenerate_tol(double h) const {
  return degenerate_gradient_tol ? *degenerate_gradient_tol : std::cbrt(h) / 10.0;
}

double SolverConfig::stencil_radius_for(const Grid& grid) const {
  if (stencil_radius) return *stencil_radius;
  return std::clamp(std::numbers::sqrt2 * std::pow(grid.domain().inradius() / grid.h(), 0.25), 2.0, 16.0);
}

void SolverConfig::validate() const {
  if (!(residual_tol > 0.0)) throw ConfigurationError("solver: residual_tol must be positive");
  if (max_iters < 1) throw ConfigurationError("solver: max_iters must be at least 1");
  if (!(pseudo_dt_safety > 0.0 && pseudo_dt_safety <= 1.0)) {
    throw ConfigurationError("solver: pseudo_dt_safety must lie in (0, 1]");
  }
  if (degenerate_gradient_tol && !(*degenerate_gradient_tol >= 0.0)) {
    throw ConfigurationError("solver: degenerate_gradient_tol must be nonnegative");
  }
  if (stencil_radius && !(*stencil_radius >= 1.0 && *stencil_radius <= 16.0)) {
    throw ConfigurationError("solver: stencil_radius must lie in [1, 16]");
  }
}

double discrete_infinity_laplacian(const ScalarField& u, int node, const SolverConfig& config) {
  const Grid& g = *u.grid;
  if (node < 0 || node >= g.size() || !g.inside(node)) throw DomainError("discrete_infinity_laplacian: node not inside");
  const TwoScale scheme(g, config.stencil_radius_for(g) * g.h());
  return scheme.row(node, dirichlet_extension(u), false).value();
}

ScalarField residual_field(const ScalarField& u, const SolverConfig& config) {
  const Grid& g = *u.grid;
  const TwoScale scheme(g, config.stencil_radius_for(g) * g.h());
  const std::vector<double> ext = dirichlet_extension(u);
  ScalarField out(u.grid, Extension::Extrapolate);
  parallel_for(g.size(), [&](int b, int e) {
    for (int k = b; k < e; ++k) {
      if (!g.inside(k)) continue;
      out.values[k] = g.signed_distance(k) < 2.0 * g.h() ? std::numeric_limits<double>::quiet_NaN()
                                                         : std::abs(scheme.row(k, ext, false).value() + 1.0);
    }
  });
  return out;
}

ScalarField web_field(GridPtr grid) {
  const Domain& d = grid->domain();
  return ScalarField::sample(grid, [&](const Vec2& p) { return web_function(d, p); }, Extension::DirichletZero);
}

SolveResult solve_dirichlet(const Domain& domain, GridPtr grid, const SolverConfig& config) {
  config.validate();
  const Grid& g = *grid;
  if (g.domain().kind() != domain.kind() || g.domain().inradius() != domain.inradius()) {
    throw InvalidInput("solve_dirichlet: grid was built for another domain");
  }
  const double h = g.h();
  const double tol = config.degenerate_tol(h);
  const TwoScale scheme(g, config.stencil_radius_for(g) * h);
  const double eps = scheme.inner_eps();

  std::vector<int> unknown(g.size(), -1);
  std::vector<int> nodes;
  for (int k = 0; k < g.size(); ++k) {
    if (g.inside(k)) {
      unknown[k] = static_cast<int>(nodes.size());
      nodes.push_back(k);
    }
  }
  const int n = static_cast<int>(nodes.size());

  SolveResult res;
  res.u = web_field(grid);
  std::vector<TwoScale::Row> rows(n);
  std::vector<double> resid(n);

  // Residual max over nodes at least 2h inside (order-independent max).
  auto evaluate = [&] {
    const std::vector<double> ext = dirichlet_extension(res.u);
    parallel_for(n, [&](int b, int e) {
      for (int q = b; q < e; ++q) {
        rows[q] = scheme.row(nodes[q], ext, true);
        resid[q] = rows[q].value() + 1.0;
      }
    });
    double worst = 0.0;
    for (int q = 0; q < n; ++q) {
      if (g.signed_distance(nodes[q]) >= 2.0 * h) worst = std::max(worst, std::abs(resid[q]));
    }
    return worst;
  };

  double r = evaluate();
  double kappa = 1.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
  krylov.preconditioner().setDroptol(1e-4);
  krylov.preconditioner().setFillfactor(4);
  krylov.setTolerance(1e-12);
  krylov.setMaxIterations(400);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs(n);
  Weights jac;
  Eigen::SparseMatrix<double> A(n, n);

  int it = 0;
  while (r > config.residual_tol && it < config.max_iters) {
    ++it;
    // Linearly implicit pseudo-time step (u' - u)/dt = F(u) + J (u' - u)
    // with local dt; kappa grows while the residual falls, so the step
    // approaches Newton's method.
    trip.clear();
    for (int q = 0; q < n; ++q) {
      const TwoScale::Row& row = rows[q];
      const double dt = kappa * config.pseudo_dt_safety * eps * eps / (4.0 * std::max(row.slope_sq(), tol * tol));
      const double inv_dt = 1.0 / dt;
      scheme.linearise(row, nodes[q], jac);
      double ju = 0.0;
      trip.emplace_back(q, q, inv_dt);
      for (const auto& [m, w] : jac) {
        trip.emplace_back(q, unknown[m], -w);
        ju += w * res.u.values[m];
      }
      rhs[q] = inv_dt * res.u.values[nodes[q]] + resid[q] - ju;
    }
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    // Preconditioned BiCGSTAB from the current iterate; sparse LU when it
    // stalls (large pseudo-time steps near the degenerate set).
    Eigen::VectorXd sol(n);
    for (int q = 0; q < n; ++q) sol[q] = res.u.values[nodes[q]];
    bool solved = false;
    krylov.compute(A);
    if (krylov.info() == Eigen::Success) {
      sol = krylov.solveWithGuess(rhs, sol);
      solved = krylov.info() == Eigen::Success;
    }
    if (!solved) {
      lu.analyzePattern(A);
      lu.factorize(A);
      if (lu.info() != Eigen::Success) {
        kappa = std::max(1.0, kappa / 16.0);
        continue;
      }
      sol = lu.solve(rhs);
    }
    const std::vector<double> prev = res.u.values;
    for (int q = 0; q < n; ++q) res.u.values[nodes[q]] = sol[q];
    const double r_new = evaluate();
    if (kappa > 1.0 && (!std::isfinite(r_new) || r_new > 4.0 * r)) {
      // Reject; retreat towards small pseudo-time steps.
      res.u.values = prev;
      r = evaluate();
      kappa = std::max(1.0, kappa / 16.0);
      continue;
    }
    kappa = r_new < r ? std::min(kappa * 4.0, 1e14) : std::max(1.0, kappa / 4.0);
    r = r_new;
  }

  for (const auto& row : rows) {
    if (row.slope_sq() < tol * tol) ++res.degenerate_nodes;
  }
  res.iterations = it;
  res.final_residual = r;
  res.converged = r <= config.residual_tol;
  std::ostringstream diag;
  diag << "iterations=" << it << " residual=" << r << " stencil_radius=" << scheme.eps()
       << " degenerate_nodes=" << res.degenerate_nodes;
  if (!res.converged) diag << " (max_iters reached before residual_tol)";
  res.diagnostics = diag.str();
  return res;
}

// ---------------------------------------------------------------------------
// Boundary gradient
// ---------------------------------------------------------------------------

double BoundaryGradient::mean() const {
  if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const auto& b : samples) s += b.grad_norm;
  return s / static_cast<double>(samples.size());
}

double BoundaryGradient::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : samples) m = std::min(m, b.grad_norm);
  return m;
}

double BoundaryGradient::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& b : samples) m = std::max(m, b.grad_norm);
  return m;
}

double BoundaryGradient::relative_spread() const { return (max() - min()) / mean(); }

BoundaryGradient boundary_gradient(const ScalarField& u, const Domain& domain, int sample_count) {
  if (sample_count < 64) throw InvalidInput("boundary_gradient: sample_count must be >= 64");
  ScalarField ud = u;
  ud.extension = Extension::DirichletZero;
  const FieldSampler f(ud);
  const double h = u.grid->h();
  BoundaryGradient out;
  for (const auto& s : domain.boundary_samples(sample_count)) {
    const double u1 = f.try_at(s.point + h * s.inward_normal);
    const double u2 = f.try_at(s.point + 2.0 * h * s.inward_normal);
    const double u3 = f.try_at(s.point + 3.0 * h * s.inward_normal);
    if (std::isnan(u1) || std::isnan(u2) || std::isnan(u3)) {
      ++out.skipped;
      continue;
    }
    // Four-point one-sided derivative with u(0) = 0.
    out.samples.push_back({s.point, (18.0 * u1 - 9.0 * u2 + 2.0 * u3) / (6.0 * h)});
  }
  return out;
}

}  // namespace inflap
