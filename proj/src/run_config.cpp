#include "inflap/run_config.hpp"

#include "inflap/errors.hpp"

#include <cmath>
#include <initializer_list>
#include <set>
#include <string>

namespace inflap {

namespace {

void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigurationError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigurationError(where + ": unknown key '" + it.key() + "'");
  }
}

const Json& need(const Json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ConfigurationError(where + ": missing '" + key + "'");
  return j.at(key);
}

double number(const Json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigurationError(what + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigurationError(what + ": not finite");
  return x;
}

int integer(const Json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ConfigurationError(what + ": expected an integer");
  return v.get<int>();
}

bool boolean(const Json& v, const std::string& what) {
  if (!v.is_boolean()) throw ConfigurationError(what + ": expected true or false");
  return v.get<bool>();
}

Vec2 point(const Json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2) throw ConfigurationError(what + ": expected [x, y]");
  return {number(v[0], what), number(v[1], what)};
}

Json point_json(const Vec2& p) { return Json::array({p.x(), p.y()}); }

std::optional<double> number_or_auto(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  const Json& v = j.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() != "auto") throw ConfigurationError(where + "." + key + ": expected a number or \"auto\"");
    return std::nullopt;
  }
  return number(v, where + "." + key);
}

}  // namespace

Domain domain_from_json(const Json& j) {
  const std::string where = "domain";
  if (!j.is_object()) throw ConfigurationError(where + ": expected an object");
  const Json& s = need(j, where, "shape");
  if (!s.is_string()) throw ConfigurationError("domain.shape: expected a string");
  const std::string shape = s.get<std::string>();
  try {
    if (shape == "ball") {
      only_keys(j, where, {"shape", "center", "radius"});
      return Domain::ball(point(need(j, where, "center"), "domain.center"),
                          number(need(j, where, "radius"), "domain.radius"));
    }
    if (shape == "stadium") {
      only_keys(j, where, {"shape", "a", "b", "radius"});
      return Domain::stadium(point(need(j, where, "a"), "domain.a"), point(need(j, where, "b"), "domain.b"),
                             number(need(j, where, "radius"), "domain.radius"));
    }
    if (shape == "ellipse") {
      only_keys(j, where, {"shape", "center", "semi_a", "semi_b"});
      return Domain::ellipse(point(need(j, where, "center"), "domain.center"),
                             number(need(j, where, "semi_a"), "domain.semi_a"),
                             number(need(j, where, "semi_b"), "domain.semi_b"));
    }
    if (shape == "polygon") {
      only_keys(j, where, {"shape", "vertices"});
      const Json& vs = need(j, where, "vertices");
      if (!vs.is_array()) throw ConfigurationError("domain.vertices: expected an array");
      std::vector<Vec2> v;
      for (const auto& p : vs) v.push_back(point(p, "domain.vertices"));
      return Domain::polygon(std::move(v));
    }
  } catch (const InvalidInput& e) {
    throw ConfigurationError(std::string("domain: ") + e.what());
  }
  throw ConfigurationError("domain.shape: unknown shape '" + shape + "'");
}

Json domain_to_json(const Domain& domain) {
  Json j;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          j["shape"] = "ball";
          j["center"] = point_json(s.center);
          j["radius"] = s.radius;
        } else if constexpr (std::is_same_v<T, Stadium>) {
          j["shape"] = "stadium";
          j["a"] = point_json(s.a);
          j["b"] = point_json(s.b);
          j["radius"] = s.radius;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          j["shape"] = "ellipse";
          j["center"] = point_json(s.center);
          j["semi_a"] = s.semi_a;
          j["semi_b"] = s.semi_b;
        } else {
          j["shape"] = "polygon";
          Json vs = Json::array();
          for (const auto& v : s.vertices) vs.push_back(point_json(v));
          j["vertices"] = vs;
        }
      },
      domain.shape());
  return j;
}

SolverConfig solver_config_from_json(const Json& j) {
  const std::string where = "solver";
  only_keys(j, where,
            {"residual_tol", "max_iters", "pseudo_dt_safety", "degenerate_gradient_tol", "stencil_radius"});
  SolverConfig c;
  if (j.contains("residual_tol")) c.residual_tol = number(j["residual_tol"], "solver.residual_tol");
  if (j.contains("max_iters")) c.max_iters = integer(j["max_iters"], "solver.max_iters");
  if (j.contains("pseudo_dt_safety")) c.pseudo_dt_safety = number(j["pseudo_dt_safety"], "solver.pseudo_dt_safety");
  c.degenerate_gradient_tol = number_or_auto(j, "degenerate_gradient_tol", where);
  c.stencil_radius = number_or_auto(j, "stencil_radius", where);
  c.validate();
  return c;
}

Json solver_config_to_json(const SolverConfig& c) {
  Json j;
  j["residual_tol"] = c.residual_tol;
  j["max_iters"] = c.max_iters;
  j["pseudo_dt_safety"] = c.pseudo_dt_safety;
  j["degenerate_gradient_tol"] = c.degenerate_gradient_tol ? Json(*c.degenerate_gradient_tol) : Json("auto");
  j["stencil_radius"] = c.stencil_radius ? Json(*c.stencil_radius) : Json("auto");
  return j;
}

std::vector<Vec2> RunConfig::flow_starts() const {
  if (!flow.starts.empty()) return flow.starts;
  std::vector<Vec2> out;
  const double inset = flow.inset * domain.inradius();
  for (const auto& s : domain.boundary_samples(flow.count)) out.push_back(s.point + inset * s.inward_normal);
  return out;
}

Json RunConfig::to_json() const {
  Json j;
  j["domain"] = domain_to_json(domain);
  j["resolution"] = resolution;
  j["solver"] = solver_config_to_json(solver);
  j["analysis"] = {{"pbounds", analysis.pbounds},
                   {"concavity", analysis.concavity},
                   {"flow", analysis.flow},
                   {"supconv", analysis.supconv},
                   {"holder", analysis.holder}};
  j["serrin"] = serrin;
  Json f = {{"count", flow.count}, {"inset", flow.inset}};
  if (!flow.starts.empty()) {
    Json s = Json::array();
    for (const auto& p : flow.starts) s.push_back(point_json(p));
    f["starts"] = s;
  }
  j["flow"] = f;
  j["concavity_samples"] = concavity_samples;
  j["output_dir"] = output_dir.generic_string();
  j["rng_seed"] = rng_seed;
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  only_keys(j, "config",
            {"domain", "resolution", "solver", "analysis", "serrin", "flow", "concavity_samples", "output_dir",
             "rng_seed"});
  RunConfig c;
  c.domain = domain_from_json(need(j, "config", "domain"));
  if (j.contains("resolution")) c.resolution = integer(j["resolution"], "resolution");
  if (c.resolution < 16) throw ConfigurationError("resolution must be at least 16");
  if (j.contains("solver")) c.solver = solver_config_from_json(j["solver"]);
  if (j.contains("analysis")) {
    const Json& a = j["analysis"];
    only_keys(a, "analysis", {"pbounds", "concavity", "flow", "supconv", "holder"});
    if (a.contains("pbounds")) c.analysis.pbounds = boolean(a["pbounds"], "analysis.pbounds");
    if (a.contains("concavity")) c.analysis.concavity = boolean(a["concavity"], "analysis.concavity");
    if (a.contains("flow")) c.analysis.flow = boolean(a["flow"], "analysis.flow");
    if (a.contains("supconv")) c.analysis.supconv = boolean(a["supconv"], "analysis.supconv");
    if (a.contains("holder")) c.analysis.holder = boolean(a["holder"], "analysis.holder");
  }
  if (j.contains("serrin")) c.serrin = boolean(j["serrin"], "serrin");
  if (j.contains("flow")) {
    const Json& f = j["flow"];
    only_keys(f, "flow", {"count", "inset", "starts"});
    if (f.contains("count")) c.flow.count = integer(f["count"], "flow.count");
    if (f.contains("inset")) c.flow.inset = number(f["inset"], "flow.inset");
    if (f.contains("starts")) {
      if (!f["starts"].is_array()) throw ConfigurationError("flow.starts: expected an array");
      for (const auto& p : f["starts"]) c.flow.starts.push_back(point(p, "flow.starts"));
    }
    if (c.flow.count < 1) throw ConfigurationError("flow.count must be at least 1");
    if (!(c.flow.inset > 0.0 && c.flow.inset < 1.0)) throw ConfigurationError("flow.inset must lie in (0, 1)");
  }
  if (j.contains("concavity_samples")) {
    c.concavity_samples = integer(j["concavity_samples"], "concavity_samples");
    if (c.concavity_samples < 1000) throw ConfigurationError("concavity_samples must be at least 1000");
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigurationError("output_dir: expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("rng_seed")) {
    if (!j["rng_seed"].is_number_unsigned()) throw ConfigurationError("rng_seed: expected a nonnegative integer");
    c.rng_seed = j["rng_seed"].get<std::uint64_t>();
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(read_json(path));
}

}  // namespace inflap
