#include "inflap/analysis.hpp"

#include "inflap/detail/parabola_envelope.hpp"
#include "inflap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace inflap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double quarter4(double g) { return 0.25 * g * g * g * g; }

Json point_json(const Vec2& p) { return Json::array({p.x(), p.y()}); }

}  // namespace

// ---------------------------------------------------------------------------
// P-function
// ---------------------------------------------------------------------------

double lipschitz_estimate(const ScalarField& u) {
  const VectorField g = gradient(u);
  double lip = 0.0;
  for (int k = 0; k < u.grid->size(); ++k) {
    if (u.grid->inside(k)) lip = std::max(lip, g[k].norm());
  }
  return lip;
}

PField p_function(const ScalarField& u, const Domain& domain) {
  ScalarField ud = u;
  ud.extension = Extension::DirichletZero;
  const Grid& g = *u.grid;
  const VectorField grad = gradient(ud);
  PField p;
  p.values = ScalarField(u.grid, Extension::Extrapolate);
  p.evaluated.assign(g.size(), 0);
  for (int k = 0; k < g.size(); ++k) {
    if (!g.inside(k)) continue;
    p.values[k] = quarter4(grad[k].norm()) + u[k];
    p.evaluated[k] = g.signed_distance(k) >= 2.0 * g.h() ? 1 : 0;
  }
  p.max_u = u.max_inside();
  p.boundary = boundary_gradient(ud, domain, 256);
  p.min_boundary_quarter_grad = quarter4(p.boundary.min());
  return p;
}

Check check_p_bounds(const PField& p, double tol) {
  const Grid& g = *p.values.grid;
  const double lo = p.min_boundary_quarter_grad - tol;
  const double hi = p.max_u + tol;
  double pmin = kInf, pmax = -kInf;
  int kmin = -1, kmax = -1, violations = 0, evaluated = 0;
  for (int k = 0; k < g.size(); ++k) {
    if (!p.evaluated[k]) continue;
    const double v = p.values[k];
    ++evaluated;
    if (v < lo || v > hi || !std::isfinite(v)) ++violations;
    if (v < pmin) pmin = v, kmin = k;
    if (v > pmax) pmax = v, kmax = k;
  }
  Check c;
  c.name = "p_bounds";
  c.tag = "P-function bounds: min over the boundary of |grad u|^4/4 <= P <= max u";
  c.passed = violations == 0 && evaluated > 0;
  c.measured["evaluated_nodes"] = evaluated;
  c.measured["violations"] = violations;
  c.measured["p_min"] = pmin;
  c.measured["p_max"] = pmax;
  c.measured["p_spread"] = pmax - pmin;
  c.measured["min_boundary_quarter_grad"] = p.min_boundary_quarter_grad;
  c.measured["max_u"] = p.max_u;
  c.measured["tol"] = tol;
  c.measured["lower_bound"] = lo;
  c.measured["upper_bound"] = hi;
  if (kmin >= 0) c.measured["p_min_at"] = point_json(g.node(kmin));
  if (kmax >= 0) c.measured["p_max_at"] = point_json(g.node(kmax));
  return c;
}

// ---------------------------------------------------------------------------
// Gradient flow
// ---------------------------------------------------------------------------

std::string to_string(FlowEnd end) {
  switch (end) {
    case FlowEnd::reached_max_set: return "reached_max_set";
    case FlowEnd::left_domain: return "left_domain";
    case FlowEnd::step_limit: return "step_limit";
    case FlowEnd::gradient_below_tol: return "gradient_below_tol";
  }
  return "unknown";
}

FlowField::FlowField(const ScalarField& u)
    : u_(u), fu_(u), fg_(gradient(u)), mu_(u.max_inside()), lip_(lipschitz_estimate(u)) {}

double FlowField::default_step() const { return u_.grid->h() / (2.0 * lip_); }

double FlowField::default_grad_tol() const { return std::cbrt(u_.grid->h()) / 5.0; }

bool FlowField::sample(const Vec2& p, double& u, Vec2& grad) const {
  if (u_.grid->domain().signed_distance(p) <= 0.0) return false;
  u = fu_.try_at(p);
  return !std::isnan(u) && fg_.try_at(p, grad);
}

Trajectory gradient_flow(const FlowField& flow, const Vec2& start, double step, double grad_tol,
                         double t_max) {
  if (!(step > 0.0) || !(t_max > 0.0) || !(grad_tol >= 0.0)) {
    throw InvalidInput("gradient_flow: step and t_max must be positive, grad_tol nonnegative");
  }
  Trajectory tr;
  tr.start = start;
  double u0;
  Vec2 g0;
  if (!flow.sample(start, u0, g0)) throw InvalidStart("gradient_flow: start outside the domain");
  if (g0.norm() <= grad_tol) throw InvalidStart("gradient_flow: start at a critical point");
  const double h = flow.field().grid->h();
  const double near_max = flow.max_u() - 2.0 * h * flow.lipschitz();
  auto arrived = [&](double u) { return u >= near_max ? FlowEnd::reached_max_set : FlowEnd::gradient_below_tol; };

  tr.samples.push_back({0.0, start, u0, g0.norm(), quarter4(g0.norm()) + u0});
  Vec2 x = start;
  double t = 0.0;
  while (true) {
    if (t > t_max) {
      tr.terminated = FlowEnd::step_limit;
      break;
    }
    Vec2 k1, k2, k3, k4;
    double dummy;
    if (!flow.sample(x, dummy, k1) || !flow.sample(x + 0.5 * step * k1, dummy, k2) ||
        !flow.sample(x + 0.5 * step * k2, dummy, k3) || !flow.sample(x + step * k3, dummy, k4)) {
      tr.terminated = FlowEnd::left_domain;
      break;
    }
    const Vec2 xn = x + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    double un;
    Vec2 gn;
    if (!flow.sample(xn, un, gn)) {
      tr.terminated = FlowEnd::left_domain;
      break;
    }
    const FlowSample& last = tr.samples.back();
    if (un <= last.u) {
      tr.terminated = arrived(last.u);
      break;
    }
    t += step;
    x = xn;
    tr.samples.push_back({t, xn, un, gn.norm(), quarter4(gn.norm()) + un});
    if (gn.norm() <= grad_tol) {
      tr.terminated = arrived(un);
      break;
    }
  }
  return tr;
}

Trajectory gradient_flow(const ScalarField& u, const Vec2& start, double step, double grad_tol,
                         double t_max) {
  return gradient_flow(FlowField(u), start, step, grad_tol, t_max);
}

namespace {

double profile(double lambda, double m, double t) {
  const double s = std::sqrt(std::max(0.0, lambda - m)) - t;
  return lambda - s * s;
}

double profile_deviation(const Trajectory& tr, double lambda, double m) {
  double dev = 0.0;
  for (const auto& s : tr.samples) dev = std::max(dev, std::abs(s.u - profile(lambda, m, s.t)));
  return dev;
}

// Least-squares lambda by golden-section search on [m, m + 4 (lambda0 - m) + 1].
double fit_lambda(const Trajectory& tr, double lambda0, double m) {
  auto sse = [&](double lambda) {
    double s = 0.0;
    for (const auto& q : tr.samples) {
      const double r = q.u - profile(lambda, m, q.t);
      s += r * r;
    }
    return s;
  };
  double a = m, b = m + 4.0 * std::max(lambda0 - m, 0.0) + 1.0;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = sse(c), fd = sse(d);
  for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - phi * (b - a), fc = sse(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + phi * (b - a), fd = sse(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Check check_p_along_flow(const Trajectory& traj, double tol) {
  Check c;
  c.name = "p_along_flow";
  c.tag = "P constant along gradient lines with profile lambda - (sqrt(lambda - m) - t)^2";
  c.measured["samples"] = static_cast<int>(traj.samples.size());
  c.measured["start"] = point_json(traj.start);
  c.measured["terminated"] = to_string(traj.terminated);
  c.measured["tol"] = tol;
  if (traj.samples.size() < 10) {
    c.passed = false;
    c.measured["error"] = "fewer than 10 samples";
    return c;
  }
  const double lambda = traj.samples.front().P;
  const double m = traj.samples.front().u;
  double drift = 0.0;
  for (const auto& s : traj.samples) drift = std::max(drift, std::abs(s.P - lambda));
  const double dev = profile_deviation(traj, lambda, m);
  const double lambda_fit = fit_lambda(traj, lambda, m);
  const FlowSample& end = traj.samples.back();
  c.passed = drift <= tol && dev <= tol;
  c.measured["lambda"] = lambda;
  c.measured["m"] = m;
  c.measured["p_drift"] = drift;
  c.measured["profile_max_deviation"] = dev;
  c.measured["lambda_least_squares"] = lambda_fit;
  c.measured["profile_max_deviation_least_squares"] = profile_deviation(traj, lambda_fit, m);
  c.measured["arrival_time"] = end.t;
  c.measured["predicted_arrival_time"] = std::sqrt(std::max(0.0, lambda - m));
  c.measured["end"] = point_json(end.point);
  return c;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,x,y,u,gradnorm,P\n";
  char buf[256];
  for (const auto& s : traj.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.point.x(),
                  s.point.y(), s.u, s.grad_norm, s.P);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sup-convolution
// ---------------------------------------------------------------------------

SupConvolution sup_convolution(const ScalarField& u, double epsilon) {
  const GridPtr grid = u.grid;
  const Grid& g = *grid;
  SupConvolution sc;
  sc.epsilon = epsilon;
  sc.lipschitz = lipschitz_estimate(u);
  sc.R = 2.0 * sc.lipschitz;
  const double limit = g.inradius() / (4.0 * sc.R);
  if (!(epsilon > 0.0) || !(epsilon < limit)) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "sup_convolution: epsilon %.6g outside (0, rho/(4R)) = (0, %.6g)",
                  epsilon, limit);
    throw ConfigurationError(msg);
  }

  // -u_eps = min_y (-u(y) + |x - y|^2 / (2 eps)), separably over rows then columns.
  const int nx = g.nx(), ny = g.ny();
  const double scale = g.h() * g.h() / (2.0 * epsilon);
  std::vector<double> f(g.size(), kInf);
  for (int k = 0; k < g.size(); ++k) {
    if (g.inside(k)) f[k] = -u[k];
  }
  std::vector<double> rows(g.size());
  std::vector<double> line_in, line_out;
  std::vector<int> arg;
  line_out.resize(std::max(nx, ny));
  arg.resize(std::max(nx, ny));
  for (int j = 0; j < ny; ++j) {
    std::span<const double> in(f.data() + j * nx, nx);
    detail::parabola_envelope(in, scale, std::span<double>(rows.data() + j * nx, nx),
                              std::span<int>(arg.data(), nx));
  }
  line_in.resize(ny);
  sc.u_eps = ScalarField(grid, Extension::Extrapolate);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) line_in[j] = rows[j * nx + i];
    detail::parabola_envelope(line_in, scale, std::span<double>(line_out.data(), ny),
                              std::span<int>(arg.data(), ny));
    for (int j = 0; j < ny; ++j) {
      const int k = j * nx + i;
      if (g.inside(k)) sc.u_eps[k] = -line_out[j];
    }
  }

  sc.U_eps_mask.assign(g.size(), 0);
  std::vector<std::uint8_t> outside_U(g.size(), 1);
  for (int k = 0; k < g.size(); ++k) {
    if (g.inside(k) && u[k] > epsilon) {
      sc.U_eps_mask[k] = 1;
      outside_U[k] = 0;
    }
  }
  const std::vector<double> dist = distance_to_mask(g, outside_U);
  sc.A_eps_mask.assign(g.size(), 0);
  for (int k = 0; k < g.size(); ++k) {
    sc.A_eps_mask[k] = sc.U_eps_mask[k] && dist[k] > epsilon * sc.R ? 1 : 0;
  }
  sc.m_eps = -kInf;
  for (int k = 0; k < g.size(); ++k) {
    if (!sc.A_eps_mask[k]) continue;
    const int i = g.column(k), j = g.row(k);
    const bool edge = i == 0 || j == 0 || i == nx - 1 || j == ny - 1 || !sc.A_eps_mask[k + 1] ||
                      !sc.A_eps_mask[k - 1] || !sc.A_eps_mask[k + nx] || !sc.A_eps_mask[k - nx];
    if (edge) sc.m_eps = std::max(sc.m_eps, sc.u_eps[k]);
  }
  if (sc.m_eps == -kInf) throw ConfigurationError("sup_convolution: A_eps is empty");
  sc.Omega_eps_mask.assign(g.size(), 0);
  for (int k = 0; k < g.size(); ++k) {
    sc.Omega_eps_mask[k] = sc.A_eps_mask[k] && sc.u_eps[k] > sc.m_eps ? 1 : 0;
  }
  return sc;
}

namespace {

// Offsets (di, dj) of the second-difference directions: both axes and diagonals.
constexpr int kDirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};

struct SecondDifferences {
  double min = kInf;
  double max = -kInf;
  int count = 0;
};

SecondDifferences second_differences(const SupConvolution& sc) {
  const Grid& g = *sc.u_eps.grid;
  const double h2 = g.h() * g.h();
  SecondDifferences out;
  for (int k = 0; k < g.size(); ++k) {
    if (!sc.Omega_eps_mask[k]) continue;
    const int i = g.column(k), j = g.row(k);
    if (i < 1 || j < 1 || i > g.nx() - 2 || j > g.ny() - 2) continue;
    for (const auto& d : kDirs) {
      const int kp = g.index(i + d[0], j + d[1]);
      const int km = g.index(i - d[0], j - d[1]);
      if (!sc.Omega_eps_mask[kp] || !sc.Omega_eps_mask[km]) continue;
      const double len2 = (d[0] * d[0] + d[1] * d[1]) * h2;
      const double dd = (sc.u_eps[kp] + sc.u_eps[km] - 2.0 * sc.u_eps[k]) / len2;
      out.min = std::min(out.min, dd);
      out.max = std::max(out.max, dd);
      ++out.count;
    }
  }
  return out;
}

// Lipschitz constant of u^{3/4} on {u >= level}.
double power_lipschitz(const ScalarField& u, const VectorField& grad, double level) {
  double m = 0.0;
  for (int k = 0; k < u.grid->size(); ++k) {
    if (!u.grid->inside(k) || !(u[k] >= level) || u[k] <= 0.0) continue;
    m = std::max(m, 0.75 * std::pow(u[k], -0.25) * grad[k].norm());
  }
  return m;
}

Vec2 centred_gradient(const ScalarField& f, int k) {
  const Grid& g = *f.grid;
  const double h2 = 2.0 * g.h();
  return Vec2((f[k + 1] - f[k - 1]) / h2, (f[k + g.nx()] - f[k - g.nx()]) / h2);
}

}  // namespace

std::vector<Check> check_sup_convolution_regularity(std::span<const SupConvolution> ladder,
                                                    const ScalarField& u) {
  std::vector<Check> checks;
  if (ladder.empty()) return checks;
  const GridPtr grid = u.grid;
  const Grid& g = *grid;
  const VectorField grad = gradient(u);

  Check above;
  above.name = "sup_convolution_above_u";
  above.tag = "sup-convolution dominates u";
  above.passed = true;
  Json rungs = Json::array();

  for (const auto& sc : ladder) {
    double below = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      if (g.inside(k)) below = std::max(below, u[k] - sc.u_eps[k]);
    }
    above.passed = above.passed && below <= 0.0;
    rungs.push_back(Json{{"epsilon", sc.epsilon}, {"max_u_minus_u_eps", below}});

    const SecondDifferences sd = second_differences(sc);
    const double eps = sc.epsilon;
    const double lower = -(1.0 + 0.05) / eps;
    Check convex;
    convex.name = "sup_convolution_semiconvex";
    convex.tag = "sup-convolution semiconvex with constant 1/eps";
    convex.passed = sd.count > 0 && sd.min >= lower;
    convex.measured["epsilon"] = eps;
    convex.measured["second_difference_min"] = sd.min;
    convex.measured["lower_bound"] = lower;
    convex.measured["stencils"] = sd.count;
    checks.push_back(convex);

    const double M = power_lipschitz(u, grad, eps);
    const double C = 4.0 / std::sqrt(eps) * M * M / 9.0;
    Check concave;
    concave.name = "sup_convolution_semiconcave";
    concave.tag = "sup-convolution semiconcave with constant 2C/(2 - eps C), C = 4 eps^{-1/2} M^2/9";
    concave.measured["epsilon"] = eps;
    concave.measured["M"] = M;
    concave.measured["C"] = C;
    concave.measured["second_difference_max"] = sd.max;
    if (eps * C >= 2.0) {
      concave.passed = false;
      concave.measured["error"] = "eps C >= 2, bound undefined";
    } else {
      const double bound = 2.0 * C / (2.0 - eps * C);
      const double upper = bound * (1.0 + 0.05);
      concave.passed = sd.count > 0 && sd.max <= upper;
      concave.measured["bound"] = bound;
      concave.measured["upper_bound"] = upper;
    }
    checks.push_back(concave);
  }
  above.measured["rungs"] = rungs;
  checks.insert(checks.begin(), above);

  // Gradients are compared on nodes whose centred stencil lies in every Omega_eps.
  std::vector<std::uint8_t> common(g.size(), 1);
  for (const auto& sc : ladder) {
    for (int k = 0; k < g.size(); ++k) common[k] = common[k] && sc.Omega_eps_mask[k];
  }
  Check conv;
  conv.name = "sup_convolution_convergence";
  conv.tag = "uniform convergence of u_eps and grad u_eps as eps decreases";
  conv.passed = true;
  Json steps = Json::array();
  double prev_u = kInf, prev_g = kInf, prev_eps = kInf;
  int nodes = 0;
  for (const auto& sc : ladder) {
    double du = 0.0, dg = 0.0;
    nodes = 0;
    for (int k = 0; k < g.size(); ++k) {
      if (g.inside(k)) du = std::max(du, std::abs(sc.u_eps[k] - u[k]));
      const int i = g.column(k), j = g.row(k);
      if (!common[k] || i < 1 || j < 1 || i > g.nx() - 2 || j > g.ny() - 2) continue;
      if (!common[k + 1] || !common[k - 1] || !common[k + g.nx()] || !common[k - g.nx()]) continue;
      dg = std::max(dg, (centred_gradient(sc.u_eps, k) - centred_gradient(u, k)).norm());
      ++nodes;
    }
    if (!(sc.epsilon < prev_eps && du < prev_u && dg < prev_g)) conv.passed = false;
    prev_u = du, prev_g = dg, prev_eps = sc.epsilon;
    steps.push_back(Json{{"epsilon", sc.epsilon}, {"max_abs_u_eps_minus_u", du}, {"max_grad_difference", dg}});
  }
  conv.passed = conv.passed && nodes > 0 && ladder.size() >= 2;
  conv.measured["gradient_nodes"] = nodes;
  conv.measured["ladder"] = steps;
  checks.push_back(conv);
  return checks;
}

Check check_p_eps_monotone(const SupConvolution& sc, int count, double tol) {
  const Grid& g = *sc.u_eps.grid;
  const Domain& domain = g.domain();
  const FlowField flow(sc.u_eps);
  const double h = g.h();
  auto in_cell = [&](const Vec2& p) {
    const Vec2 q = (p - g.origin()) / h;
    const int i = static_cast<int>(std::floor(q.x())), j = static_cast<int>(std::floor(q.y()));
    if (i < 0 || j < 0 || i + 1 >= g.nx() || j + 1 >= g.ny()) return false;
    return sc.Omega_eps_mask[g.index(i, j)] && sc.Omega_eps_mask[g.index(i + 1, j)] &&
           sc.Omega_eps_mask[g.index(i, j + 1)] && sc.Omega_eps_mask[g.index(i + 1, j + 1)];
  };

  Check c;
  c.name = "p_eps_monotone";
  c.tag = "P_eps nondecreasing along the gradient flow of the sup-convolution";
  c.measured["epsilon"] = sc.epsilon;
  c.measured["tol"] = tol;
  c.passed = true;
  double worst = 0.0;
  int flows = 0;
  Json per = Json::array();
  for (const auto& b : domain.boundary_samples(count)) {
    Vec2 start = b.point;
    bool found = false;
    for (double s = 0.0; s < domain.inradius(); s += 0.25 * h) {
      start = b.point + s * b.inward_normal;
      if (in_cell(start)) {
        found = true;
        break;
      }
    }
    if (!found) {
      c.passed = false;
      per.push_back(Json{{"start", point_json(b.point)}, {"error", "no start in Omega_eps"}});
      continue;
    }
    Trajectory tr;
    try {
      tr = gradient_flow(flow, start, flow.default_step(), flow.default_grad_tol(), 20.0 * std::sqrt(flow.max_u()));
    } catch (const InvalidStart& e) {
      c.passed = false;
      per.push_back(Json{{"start", point_json(start)}, {"error", e.what()}});
      continue;
    }
    double run = -kInf, drop = 0.0;
    for (const auto& s : tr.samples) {
      run = std::max(run, s.P);
      drop = std::max(drop, run - s.P);
    }
    worst = std::max(worst, drop);
    ++flows;
    if (drop > tol) c.passed = false;
    per.push_back(Json{{"start", point_json(start)},
                       {"samples", static_cast<int>(tr.samples.size())},
                       {"terminated", to_string(tr.terminated)},
                       {"p_start", tr.samples.front().P},
                       {"p_end", tr.samples.back().P},
                       {"max_drop", drop}});
  }
  c.measured["trajectories"] = flows;
  c.measured["max_drop"] = worst;
  c.measured["per_trajectory"] = per;
  return c;
}

// ---------------------------------------------------------------------------
// Hoelder exponent
// ---------------------------------------------------------------------------

std::vector<double> default_holder_radii(double h) {
  std::vector<double> r;
  for (double m : {4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0}) r.push_back(m * h);
  return r;
}

HolderFit holder_exponent_near_max(const ScalarField& u, const PField& p, std::span<const double> fit_radii) {
  const Grid& g = *u.grid;
  const double h = g.h();
  const double level = p.max_u - 0.5 * kWebConstant * std::pow(h, 4.0 / 3.0);
  std::vector<std::uint8_t> K(g.size(), 0);
  HolderFit fit;
  for (int k = 0; k < g.size(); ++k) {
    if (g.inside(k) && u[k] >= level) {
      K[k] = 1;
      ++fit.max_set_nodes;
    }
  }
  const std::vector<double> dist = distance_to_mask(g, K);
  ScalarField ud = u;
  ud.extension = Extension::DirichletZero;
  const VectorField grad = gradient(ud);
  for (double r : fit_radii) {
    if (!(r > 0.0) || r > 0.5 * g.inradius()) continue;
    double m = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      if (g.inside(k) && dist[k] <= r * (1.0 + 1e-12)) m = std::max(m, grad[k].norm());
    }
    if (m <= 0.0) continue;
    fit.radii.push_back(r);
    fit.grad_max.push_back(m);
  }
  const int n = static_cast<int>(fit.radii.size());
  if (n < 3) throw InsufficientData("holder_exponent_near_max: fewer than 3 usable radii");
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += std::log(fit.radii[i]);
    sy += std::log(fit.grad_max[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = std::log(fit.radii[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(fit.grad_max[i]) - my);
  }
  fit.alpha = sxy / sxx;
  double ssr = 0;
  for (int i = 0; i < n; ++i) {
    const double r = std::log(fit.grad_max[i]) - my - fit.alpha * (std::log(fit.radii[i]) - mx);
    ssr += r * r;
  }
  fit.band = n > 2 ? 2.0 * std::sqrt(ssr / (n - 2) / sxx) : kNaN;
  return fit;
}

}  // namespace inflap
