#include "inflap/serrin.hpp"

#include "inflap/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace inflap {

namespace {

Json point_json(const Vec2& p) { return Json::array({p.x(), p.y()}); }

// Largest |sd_b| over boundary samples of a, both ways round.
double boundary_hausdorff(const Domain& a, const Domain& b, int samples) {
  double worst = 0.0;
  for (const auto& s : a.boundary_samples(samples)) worst = std::max(worst, std::abs(b.signed_distance(s.point)));
  for (const auto& s : b.boundary_samples(samples)) worst = std::max(worst, std::abs(a.signed_distance(s.point)));
  return worst;
}

}  // namespace

std::string to_string(SerrinVerdict v) {
  switch (v) {
    case SerrinVerdict::consistent_web_domain: return "consistent_web_domain";
    case SerrinVerdict::inconsistent: return "inconsistent";
    case SerrinVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

SerrinTolerances SerrinTolerances::for_resolution(int resolution) {
  const double scale = 128.0 / resolution;
  return {0.05 * scale, 0.05 * scale};
}

WebAgreement web_agreement(const ScalarField& u, const Domain& domain) {
  const Grid& g = *u.grid;
  const double mu = u.max_inside();
  WebAgreement w;
  double sum = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    if (!g.inside(k) || g.signed_distance(k) < 2.0 * g.h()) continue;
    const double e = std::abs(u[k] - web_function(domain, g.node(k)));
    w.linf = std::max(w.linf, e);
    sum += e * e;
    ++w.nodes;
  }
  if (w.nodes > 0 && mu > 0.0) {
    w.linf /= mu;
    w.l2 = std::sqrt(sum / w.nodes) / mu;
  }
  return w;
}

std::optional<StadiumReconstruction> stadium_reconstruct(const Grid& grid) {
  const Domain& domain = grid.domain();
  const double h = grid.h();
  if (!cut_equals_high_ridge(domain, 2.0 * h).equal) return std::nullopt;
  const auto mask = high_ridge_mask(grid, h);
  std::vector<Vec2> pts;
  for (int k = 0; k < grid.size(); ++k) {
    if (mask[k]) pts.push_back(grid.node(k));
  }
  if (pts.empty()) return std::nullopt;
  Vec2 mean = Vec2::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  Vec2 axis = es.eigenvectors().col(1);
  // Fix the sign so the result does not depend on the eigen solver.
  if (axis.x() < 0.0 || (axis.x() == 0.0 && axis.y() < 0.0)) axis = -axis;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : pts) {
    const double s = (p - mean).dot(axis);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  StadiumReconstruction r;
  r.ridge_nodes = static_cast<int>(pts.size());
  const double rho = domain.inradius();
  // The mask thickens the core segment by h on every side.
  lo += h;
  hi -= h;
  r.degenerate = hi - lo < 2.0 * h;
  if (r.degenerate) {
    r.stadium = {mean, mean, rho};
  } else {
    r.stadium = {mean + lo * axis, mean + hi * axis, rho};
  }
  const Domain rebuilt = Domain::stadium(r.stadium.a, r.stadium.b, rho);
  r.boundary_hausdorff = boundary_hausdorff(rebuilt, domain, 1024);
  return r;
}

SerrinReport serrin_diagnose(const Domain& domain, int resolution, const SolverConfig& config,
                             const SerrinTolerances& tols) {
  const GridPtr grid = build_grid(domain, resolution);
  return serrin_diagnose(domain, resolution, solve_dirichlet(domain, grid, config), tols);
}

SerrinReport serrin_diagnose(const Domain& domain, int resolution, const SolveResult& solve,
                             const SerrinTolerances& tols) {
  const Grid& g = *solve.u.grid;
  const double h = g.h();
  SerrinReport r;
  r.shape = domain.kind();
  r.resolution = resolution;
  r.h = h;
  r.rho = domain.inradius();
  r.tolerances = tols;
  r.solver_converged = solve.converged;
  r.solver_iterations = solve.iterations;
  r.solver_residual = solve.final_residual;
  r.solver_diagnostics = solve.diagnostics;

  const PField p = p_function(solve.u, domain);
  r.mu = p.max_u;
  r.predicted_mu = kWebConstant * std::pow(r.rho, 4.0 / 3.0);
  r.a = p.boundary.mean();
  r.a_min = p.boundary.min();
  r.a_max = p.boundary.max();
  r.boundary_grad_relative_spread = p.boundary.relative_spread();
  r.boundary_samples = static_cast<int>(p.boundary.samples.size());
  r.boundary_skipped = p.boundary.skipped;
  r.predicted_a = std::cbrt(3.0 * r.rho);
  double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
  for (int k = 0; k < g.size(); ++k) {
    if (!p.evaluated[k]) continue;
    pmin = std::min(pmin, p.values[k]);
    pmax = std::max(pmax, p.values[k]);
  }
  r.p_spread = pmax >= pmin ? pmax - pmin : 0.0;
  r.web = web_agreement(solve.u, domain);

  const CutHighComparison ch = cut_equals_high_ridge(domain, 2.0 * h);
  r.cut_high_verdict = ch.equal;
  r.cut_high_hausdorff = ch.hausdorff;
  r.diametral = diametral_ball_check(domain, 2.0 * h);

  const bool polygon = std::holds_alternative<ConvexPolygon>(domain.shape());
  r.hypothesis_flags.push_back("hOmega_ok");
  r.hypothesis_flags.push_back("Hu_assumed");
  if (polygon) r.hypothesis_flags.push_back("Hu_unverified");
  if (std::holds_alternative<Ball>(domain.shape())) {
    r.classification_note = "C2 boundary: a C2 domain admits a solution only if it is a ball, which it is";
  } else if (const auto* e = std::get_if<Ellipse>(&domain.shape())) {
    r.classification_note = e->semi_a > e->semi_b
                                ? "C2 boundary: a C2 domain admits a solution only if it is a ball; this ellipse is not"
                                : "C2 boundary: a C2 domain admits a solution only if it is a ball, which it is";
  }
  r.reconstruction = stadium_reconstruct(g);

  const bool spread_ok = r.boundary_grad_relative_spread <= tols.a_rel;
  const bool p_ok = r.p_spread <= tols.p_rel * r.mu;
  const bool a_ok = std::abs(r.a - r.predicted_a) <= tols.a_rel * r.a;
  if (!solve.converged) {
    r.verdict = SerrinVerdict::inconclusive;
    r.reasons.push_back("solver did not converge");
  } else if (spread_ok && p_ok && r.cut_high_verdict && a_ok) {
    r.verdict = SerrinVerdict::consistent_web_domain;
    r.reasons.push_back("boundary gradient constant, P constant, a matches (3 rho)^{1/3}, cut locus equals high ridge");
  } else if (r.boundary_grad_relative_spread > 2.0 * tols.a_rel || (!r.cut_high_verdict && r.diametral.found)) {
    r.verdict = SerrinVerdict::inconsistent;
    if (r.boundary_grad_relative_spread > 2.0 * tols.a_rel) r.reasons.push_back("boundary gradient spread above twice the tolerance");
    if (!r.cut_high_verdict && r.diametral.found) r.reasons.push_back("diametral ball present but cut locus differs from high ridge");
  } else {
    r.verdict = SerrinVerdict::inconclusive;
    if (!spread_ok) r.reasons.push_back("boundary gradient spread above tolerance");
    if (!p_ok) r.reasons.push_back("P spread above tolerance");
    if (!a_ok) r.reasons.push_back("a differs from (3 rho)^{1/3}");
    if (!r.cut_high_verdict) r.reasons.push_back("cut locus differs from high ridge without a diametral ball");
  }
  return r;
}

Json SerrinReport::to_json() const {
  Json j;
  j["shape"] = shape;
  j["resolution"] = resolution;
  j["h"] = h;
  j["rho"] = rho;
  j["tolerances"] = {{"a_rel", tolerances.a_rel}, {"p_rel", tolerances.p_rel}, {"p_abs", tolerances.p_rel * mu}};
  j["solver"] = {{"converged", solver_converged},
                 {"iterations", solver_iterations},
                 {"final_residual", solver_residual},
                 {"diagnostics", solver_diagnostics}};
  j["mu"] = mu;
  j["predicted_mu"] = predicted_mu;
  j["boundary_grad_mean"] = a;
  j["boundary_grad_min"] = a_min;
  j["boundary_grad_max"] = a_max;
  j["boundary_grad_relative_spread"] = boundary_grad_relative_spread;
  j["boundary_samples"] = boundary_samples;
  j["boundary_skipped"] = boundary_skipped;
  j["predicted_a"] = predicted_a;
  j["a_relative_error"] = a > 0.0 ? std::abs(a - predicted_a) / a : 0.0;
  j["p_spread"] = p_spread;
  j["web_agreement"] = {{"linf", web.linf}, {"l2", web.l2}, {"nodes", web.nodes}};
  j["cut_high_verdict"] = cut_high_verdict;
  j["cut_high_hausdorff"] = cut_high_hausdorff;
  Json d = {{"found", diametral.found}};
  if (diametral.found) {
    d["center"] = point_json(diametral.center);
    d["y_plus"] = point_json(diametral.y_plus);
    d["y_minus"] = point_json(diametral.y_minus);
  }
  j["diametral_ball"] = d;
  j["hypothesis_flags"] = hypothesis_flags;
  j["classification_note"] = classification_note;
  if (reconstruction) {
    j["stadium_reconstruction"] = {{"a", point_json(reconstruction->stadium.a)},
                                   {"b", point_json(reconstruction->stadium.b)},
                                   {"radius", reconstruction->stadium.radius},
                                   {"degenerate", reconstruction->degenerate},
                                   {"boundary_hausdorff", reconstruction->boundary_hausdorff},
                                   {"ridge_nodes", reconstruction->ridge_nodes}};
  } else {
    j["stadium_reconstruction"] = nullptr;
  }
  j["verdict"] = to_string(verdict);
  j["reasons"] = reasons;
  j["paper_tags"] = Json::array({
      {{"field", "boundary_grad_relative_spread"}, {"tag", "overdetermined condition |grad u| = a on the boundary"}},
      {{"field", "predicted_a"}, {"tag", "a solution forces a = (3 rho)^{1/3}"}},
      {{"field", "p_spread"}, {"tag", "P constant exactly when u is the web function"}},
      {{"field", "web_agreement"}, {"tag", "a solution forces u to be the web function"}},
      {{"field", "cut_high_verdict"}, {"tag", "a solution forces the cut locus to equal the high ridge"}},
      {{"field", "diametral_ball"}, {"tag", "inscribed ball meeting the boundary at two diametral points"}},
      {{"field", "stadium_reconstruction"}, {"tag", "planar web domains are stadium-like, possibly a ball"}},
      {{"field", "classification_note"}, {"tag", "a C2 web domain is a ball"}},
  });
  return j;
}

}  // namespace inflap
