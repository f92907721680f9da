#include "inflap/commands.hpp"

#include "inflap/analysis.hpp"
#include "inflap/errors.hpp"
#include "inflap/field_io.hpp"
#include "inflap/serrin.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>

namespace inflap {

namespace fs = std::filesystem;

namespace {

Json point_json(const Vec2& p) { return Json::array({p.x(), p.y()}); }

Json grid_json(const Grid& g) {
  return {{"nx", g.nx()}, {"ny", g.ny()}, {"h", g.h()}, {"origin", point_json(g.origin())},
          {"inside_nodes", g.inside_count()}};
}

// The part of a config that determines the solution.
Json solve_key(const RunConfig& cfg) {
  return {{"domain", domain_to_json(cfg.domain)}, {"resolution", cfg.resolution},
          {"solver", solver_config_to_json(cfg.solver)}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw ConfigurationError("cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigurationError("cannot create output directory " + dir.string());
}

// Runs a command body, mapping configuration-type failures to exit 2.
int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigurationError& e) {
    log << "error: " << e.what() << "\n";
  } catch (const InvalidInput& e) {
    log << "error: " << e.what() << "\n";
  } catch (const InvalidStart& e) {
    log << "error: invalid start: " << e.what() << "\n";
  } catch (const DomainError& e) {
    log << "error: " << e.what() << "\n";
  } catch (const UnsupportedError& e) {
    log << "error: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    log << "error: " << e.what() << "\n";
  }
  return kExitConfig;
}

ScalarField power_three_quarters(const ScalarField& u) {
  ScalarField w = u;
  for (auto& v : w.values) {
    if (!std::isnan(v)) v = std::pow(std::max(v, 0.0), 0.75);
  }
  return w;
}

std::vector<Check> suite_pbounds(const ScalarField& u, const Domain& domain) {
  const PField p = p_function(u, domain);
  return {check_p_bounds(p, 0.05 * p.max_u)};
}

std::vector<Check> suite_concavity(const RunConfig& cfg, const ScalarField& u) {
  const double h = u.grid->h();
  const ScalarField w = power_three_quarters(u);
  const ConcavityDeficit cd = midpoint_concavity_deficit(w, cfg.concavity_samples, cfg.rng_seed);
  Check conc;
  conc.name = "power_concavity";
  conc.tag = "u^{3/4} is concave";
  conc.passed = cd.worst <= 10.0 * h;
  conc.measured = {{"worst_deficit", cd.worst}, {"tol", 10.0 * h}, {"samples", cd.samples},
                   {"rng_seed", cfg.rng_seed}, {"witness_x", point_json(cd.x)},
                   {"witness_y", point_json(cd.y)}, {"witness_lambda", cd.lambda}};

  ScalarField neg = w;
  for (auto& v : neg.values) v = -v;
  const ScalarField env = convex_envelope(neg);
  double dev = 0.0;
  for (int k = 0; k < u.grid->size(); ++k) {
    if (u.grid->inside(k)) dev = std::max(dev, std::abs(env[k] - neg[k]));
  }
  Check envc;
  envc.name = "convex_envelope";
  envc.tag = "the convex envelope of -u^{3/4} equals -u^{3/4}";
  envc.passed = dev <= 5.0 * h;
  envc.measured = {{"max_deviation", dev}, {"tol", 5.0 * h}};
  return {conc, envc};
}

struct FlowRun {
  std::vector<Trajectory> trajectories;
  std::vector<Check> checks;
};

FlowRun run_flows(const ScalarField& u, const std::vector<Vec2>& starts) {
  const Grid& g = *u.grid;
  const Domain& domain = g.domain();
  const double h = g.h();
  const FlowField flow(u);
  const double mu = flow.max_u();
  const double tol = 0.03 * mu;
  const Locus ridge = domain.high_ridge();

  FlowRun run;
  Check arrival;
  arrival.name = "flow_arrival";
  arrival.tag = "gradient lines reach the max set at time sqrt(lambda - m)";
  arrival.passed = true;
  Check profile;
  profile.name = "p_along_flow";
  profile.tag = "P constant along gradient lines with profile lambda - (sqrt(lambda - m) - t)^2";
  profile.passed = true;
  Json arr = Json::array(), per = Json::array();
  double worst_end = 0.0, worst_time = 0.0, worst_drift = 0.0, worst_dev = 0.0;
  for (const auto& s : starts) {
    Trajectory tr = gradient_flow(flow, s, flow.default_step(), flow.default_grad_tol(), 20.0 * std::sqrt(mu));
    const Check c = check_p_along_flow(tr, tol);
    const Vec2 end = tr.samples.back().point;
    const double end_dist = ridge.distance_to(end);
    const double t = tr.arrival_time();
    const double t_pred = std::sqrt(std::max(0.0, tr.samples.front().P - tr.samples.front().u));
    const double t_rel = t_pred > 0.0 ? std::abs(t - t_pred) / t_pred : 0.0;
    const bool ok = tr.terminated == FlowEnd::reached_max_set && end_dist <= 5.0 * h && t_rel <= 0.05;
    arrival.passed = arrival.passed && ok;
    profile.passed = profile.passed && c.passed;
    worst_end = std::max(worst_end, end_dist);
    worst_time = std::max(worst_time, t_rel);
    if (c.measured.contains("p_drift")) {
      worst_drift = std::max(worst_drift, c.measured["p_drift"].get<double>());
      worst_dev = std::max(worst_dev, c.measured["profile_max_deviation"].get<double>());
    }
    arr.push_back({{"start", point_json(s)}, {"end", point_json(end)}, {"terminated", to_string(tr.terminated)},
                   {"end_distance_to_high_ridge", end_dist}, {"arrival_time", t},
                   {"predicted_arrival_time", t_pred}, {"relative_time_error", t_rel}});
    per.push_back(c.measured);
    run.trajectories.push_back(std::move(tr));
  }
  arrival.measured = {{"trajectories", static_cast<int>(starts.size())},
                      {"max_end_distance", worst_end},
                      {"end_tol", 5.0 * h},
                      {"max_relative_time_error", worst_time},
                      {"time_tol", 0.05},
                      {"sqrt_mu", std::sqrt(mu)},
                      {"per_trajectory", arr}};
  profile.measured = {{"trajectories", static_cast<int>(starts.size())},
                      {"max_p_drift", worst_drift},
                      {"max_profile_deviation", worst_dev},
                      {"tol", tol},
                      {"per_trajectory", per}};
  run.checks = {arrival, profile};
  return run;
}

std::vector<Check> suite_supconv(const ScalarField& u, int flow_count) {
  const double h = u.grid->h();
  const double mu = u.max_inside();
  std::vector<SupConvolution> ladder;
  try {
    for (double m : {4.0, 2.0, 1.0}) ladder.push_back(sup_convolution(u, m * h));
  } catch (const ConfigurationError& e) {
    Check c;
    c.name = "sup_convolution_range";
    c.tag = "sup-convolution needs eps < rho / (4R)";
    c.passed = false;
    c.measured = {{"error", e.what()}};
    return {c};
  }
  std::vector<Check> out = check_sup_convolution_regularity(ladder, u);
  for (const auto& sc : ladder) out.push_back(check_p_eps_monotone(sc, flow_count, 0.02 * mu));
  return out;
}

std::vector<Check> suite_holder(const ScalarField& u, const Domain& domain) {
  const PField p = p_function(u, domain);
  Check c;
  c.name = "holder_exponent";
  c.tag = "|grad u| is Hoelder with exponent exactly 1/3 near the max set";
  try {
    const HolderFit f = holder_exponent_near_max(u, p, default_holder_radii(u.grid->h()));
    c.passed = std::abs(f.alpha - 1.0 / 3.0) <= 0.07;
    c.measured = {{"alpha", f.alpha}, {"band", f.band}, {"target", 1.0 / 3.0}, {"tol", 0.07},
                  {"max_set_nodes", f.max_set_nodes}, {"radii", f.radii}, {"grad_max", f.grad_max}};
  } catch (const InsufficientData& e) {
    c.passed = false;
    c.measured = {{"error", e.what()}};
  }
  return {c};
}

// Config echo for reports; the output directory does not affect results.
Json config_echo(const RunConfig& cfg) {
  Json j = cfg.to_json();
  j.erase("output_dir");
  return j;
}

void append(std::vector<Check>& to, std::vector<Check> from) {
  for (auto& c : from) to.push_back(std::move(c));
}

}  // namespace

RunConfig resolve_config(const CommandOptions& opts) {
  RunConfig cfg = load_run_config(opts.config);
  if (opts.out) cfg.output_dir = *opts.out;
  if (opts.resolution) {
    if (*opts.resolution < 16) throw ConfigurationError("resolution must be at least 16");
    cfg.resolution = *opts.resolution;
  }
  if (opts.seed) cfg.rng_seed = *opts.seed;
  return cfg;
}

Solution obtain_solution(const RunConfig& cfg, std::ostream& log) {
  const GridPtr grid = build_grid(cfg.domain, cfg.resolution);
  const fs::path dir = cfg.output_dir;
  const Json key = solve_key(cfg);
  Solution s;
  if (fs::exists(dir / "solve.json") && fs::exists(dir / "u.iglfield")) {
    const Json prev = read_json(dir / "solve.json");
    if (prev.contains("key") && prev["key"] == key) {
      s.result.u = to_scalar_field(read_field(dir / "u.iglfield"), grid, Extension::DirichletZero);
      s.result.converged = prev.at("converged").get<bool>();
      s.result.iterations = prev.at("iterations").get<int>();
      s.result.final_residual = prev.at("final_residual").get<double>();
      s.result.degenerate_nodes = prev.at("degenerate_nodes").get<int>();
      s.result.diagnostics = prev.at("diagnostics").get<std::string>();
      s.reused = true;
      log << "reusing solution in " << dir.string() << "\n";
      return s;
    }
  }
  ensure_dir(dir);
  log << "solving " << cfg.domain.kind() << " at resolution " << cfg.resolution << "\n";
  s.result = solve_dirichlet(cfg.domain, grid, cfg.solver);
  const SolveResult& r = s.result;

  const ScalarField d = ScalarField::sample(grid, [&](const Vec2& p) { return cfg.domain.signed_distance(p); });
  const PField p = p_function(r.u, cfg.domain);
  write_field(dir / "u.iglfield", r.u);
  write_field(dir / "d.iglfield", d);
  write_field(dir / "P.iglfield", p.values);

  const double rho = cfg.domain.inradius();
  Json j;
  j["key"] = key;
  j["grid"] = grid_json(*grid);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["final_residual"] = r.final_residual;
  j["residual_tol"] = cfg.solver.residual_tol;
  j["degenerate_nodes"] = r.degenerate_nodes;
  j["stencil_radius"] = cfg.solver.stencil_radius_for(*grid);
  j["degenerate_gradient_tol"] = cfg.solver.degenerate_tol(grid->h());
  j["mu"] = r.u.max_inside();
  j["rho"] = rho;
  j["predicted_mu"] = kWebConstant * std::pow(rho, 4.0 / 3.0);
  j["diagnostics"] = r.diagnostics;
  write_json(dir / "solve.json", j);
  log << r.diagnostics << "\n";
  return s;
}

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s = {"concavity", "pbounds", "supconv", "flow", "holder", "all"};
  return s;
}

std::vector<Check> run_verify_suite(const RunConfig& cfg, const ScalarField& u, const std::string& suite) {
  const AnalysisToggles& on = cfg.analysis;
  const bool all = suite == "all";
  if (!all && suite != "concavity" && suite != "pbounds" && suite != "supconv" && suite != "flow" &&
      suite != "holder") {
    throw ConfigurationError("unknown suite '" + suite + "'");
  }
  std::vector<Check> out;
  if (suite == "pbounds" || (all && on.pbounds)) append(out, suite_pbounds(u, cfg.domain));
  if (suite == "concavity" || (all && on.concavity)) append(out, suite_concavity(cfg, u));
  if (suite == "flow" || (all && on.flow)) append(out, run_flows(u, cfg.flow_starts()).checks);
  if (suite == "supconv" || (all && on.supconv)) append(out, suite_supconv(u, cfg.flow.count));
  if (suite == "holder" || (all && on.holder)) append(out, suite_holder(u, cfg.domain));
  return out;
}

int cmd_solve(const CommandOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = resolve_config(opts);
    const Solution s = obtain_solution(cfg, log);
    return s.result.converged ? kExitOk : kExitNotConverged;
  });
}

int cmd_verify(const CommandOptions& opts, const std::string& suite, std::ostream& log) {
  return guarded(log, [&] {
    const auto& known = verify_suites();
    if (std::find(known.begin(), known.end(), suite) == known.end()) {
      throw ConfigurationError("unknown suite '" + suite + "'");
    }
    RunConfig cfg = resolve_config(opts);
    const Solution s = obtain_solution(cfg, log);
    const std::vector<Check> checks = run_verify_suite(cfg, s.result.u, suite);
    Json j;
    j["suite"] = suite;
    j["config"] = config_echo(cfg);
    j["grid"] = grid_json(*s.result.u.grid);
    j["solver"] = {{"converged", s.result.converged},
                   {"iterations", s.result.iterations},
                   {"final_residual", s.result.final_residual}};
    j["mu"] = s.result.u.max_inside();
    Json arr = Json::array();
    for (const auto& c : checks) arr.push_back(c.to_json());
    j["checks"] = arr;
    const bool passed = all_passed(checks) && !checks.empty();
    j["passed"] = passed;
    write_json(cfg.output_dir / ("verify_" + suite + ".json"), j);
    for (const auto& c : checks) log << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
    if (!s.result.converged) return static_cast<int>(kExitNotConverged);
    return passed ? static_cast<int>(kExitOk) : static_cast<int>(kExitChecksFailed);
  });
}

int cmd_serrin(const CommandOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = resolve_config(opts);
    const Solution s = obtain_solution(cfg, log);
    const SerrinReport r =
        serrin_diagnose(cfg.domain, cfg.resolution, s.result, SerrinTolerances::for_resolution(cfg.resolution));
    write_json(cfg.output_dir / "serrin.json", r.to_json());
    log << "verdict " << to_string(r.verdict) << "\n";
    return r.verdict == SerrinVerdict::inconclusive ? kExitInconclusive : kExitOk;
  });
}

int cmd_flow(const CommandOptions& opts, const std::vector<Vec2>& starts, std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = resolve_config(opts);
    const std::vector<Vec2> from = starts.empty() ? cfg.flow_starts() : starts;
    for (const auto& p : from) {
      if (!(cfg.domain.signed_distance(p) > 0.0)) {
        throw InvalidStart("(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ") is not inside the domain");
      }
    }
    const Solution s = obtain_solution(cfg, log);
    const FlowRun run = run_flows(s.result.u, from);
    Json files = Json::array();
    for (std::size_t i = 0; i < run.trajectories.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "trajectory_%03zu.csv", i);
      write_text(cfg.output_dir / name, trajectory_csv(run.trajectories[i]));
      files.push_back(name);
    }
    Json j;
    j["config"] = config_echo(cfg);
    j["mu"] = s.result.u.max_inside();
    j["files"] = files;
    Json arr = Json::array();
    for (const auto& c : run.checks) arr.push_back(c.to_json());
    j["checks"] = arr;
    const bool passed = all_passed(run.checks);
    j["passed"] = passed;
    write_json(cfg.output_dir / "flow.json", j);
    for (const auto& c : run.checks) log << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
    return passed ? kExitOk : kExitChecksFailed;
  });
}

int cmd_geometry(const CommandOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = resolve_config(opts);
    const GridPtr grid = build_grid(cfg.domain, cfg.resolution);
    const double h = grid->h();
    const fs::path dir = cfg.output_dir;
    ensure_dir(dir);
    char buf[128];
    auto points_csv = [&](const std::vector<Vec2>& pts) {
      std::string s = "x,y\n";
      for (const auto& p : pts) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x(), p.y());
        s += buf;
      }
      return s;
    };
    auto mask_points = [&](const std::vector<std::uint8_t>& mask) {
      std::vector<Vec2> pts;
      for (int k = 0; k < grid->size(); ++k) {
        if (mask[k]) pts.push_back(grid->node(k));
      }
      return pts;
    };
    const Locus cut = cfg.domain.cut_locus();
    const Locus high = cfg.domain.high_ridge();
    write_text(dir / "cut_locus.csv", points_csv(cut.sample(h)));
    write_text(dir / "high_ridge.csv", points_csv(high.sample(h)));
    const auto cut_mask = cut_locus_mask(*grid, 0.2);
    const auto high_mask = high_ridge_mask(*grid, h);
    write_text(dir / "cut_locus_nodes.csv", points_csv(mask_points(cut_mask)));
    write_text(dir / "high_ridge_nodes.csv", points_csv(mask_points(high_mask)));
    std::string web = "x,y,d,phi\n";
    for (int k = 0; k < grid->size(); ++k) {
      if (!grid->inside(k)) continue;
      const Vec2 p = grid->node(k);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.x(), p.y(), grid->signed_distance(k),
                    web_function(cfg.domain, p));
      web += buf;
    }
    write_text(dir / "web.csv", web);

    const CutHighComparison ch = cut_equals_high_ridge(cfg.domain, 2.0 * h);
    const DiametralBall db = diametral_ball_check(cfg.domain, 2.0 * h);
    Json j;
    j["domain"] = domain_to_json(cfg.domain);
    j["grid"] = grid_json(*grid);
    j["inradius"] = cfg.domain.inradius();
    j["area"] = cfg.domain.area();
    j["perimeter"] = cfg.domain.perimeter();
    j["max_web_function"] = kWebConstant * std::pow(cfg.domain.inradius(), 4.0 / 3.0);
    j["cut_equals_high_ridge"] = {{"equal", ch.equal}, {"hausdorff", ch.hausdorff}, {"tol", 2.0 * h}};
    Json d = {{"found", db.found}};
    if (db.found) {
      d["center"] = point_json(db.center);
      d["y_plus"] = point_json(db.y_plus);
      d["y_minus"] = point_json(db.y_minus);
    }
    j["diametral_ball"] = d;
    j["cut_locus_mask_nodes"] = static_cast<int>(mask_points(cut_mask).size());
    j["high_ridge_mask_nodes"] = static_cast<int>(mask_points(high_mask).size());
    j["files"] = {"cut_locus.csv", "high_ridge.csv", "cut_locus_nodes.csv", "high_ridge_nodes.csv", "web.csv"};
    write_json(dir / "geometry.json", j);
    log << "cut_equals_high_ridge " << (ch.equal ? "true" : "false") << " hausdorff " << ch.hausdorff << "\n";
    return kExitOk;
  });
}

}  // namespace inflap
