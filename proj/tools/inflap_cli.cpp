#include "inflap/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

struct Common {
  std::string config;
  std::string out;
  int resolution = 0;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "run configuration (JSON)")->required();
  sub->add_option("--out", c.out, "output directory (overrides output_dir)");
  sub->add_option("--resolution", c.resolution, "grid resolution (overrides resolution)");
  sub->add_option("--seed", c.seed, "rng seed (overrides rng_seed)");
}

inflap::CommandOptions options(const CLI::App* sub, const Common& c) {
  inflap::CommandOptions o;
  o.config = c.config;
  if (sub->count("--out")) o.out = c.out;
  if (sub->count("--resolution")) o.resolution = c.resolution;
  if (sub->count("--seed")) o.seed = c.seed;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet problem -Delta_inf u = 1 on planar convex domains"};
  app.require_subcommand(1);
  Common common;

  auto* solve = app.add_subcommand("solve", "solve and write u, d, P fields and solve.json");
  add_common(solve, common);

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a verification suite and write verify_<suite>.json");
  verify->add_option("suite", suite, "concavity | pbounds | supconv | flow | holder | all")->required();
  add_common(verify, common);

  auto* serrin = app.add_subcommand("serrin", "overdetermined-problem diagnosis, writes serrin.json");
  add_common(serrin, common);

  std::vector<std::string> starts;
  auto* flow = app.add_subcommand("flow", "gradient-flow trajectories as CSV plus flow.json");
  flow->add_option("--start", starts, "start point x,y (repeatable); default: config starts");
  add_common(flow, common);

  auto* geometry = app.add_subcommand("geometry", "cut locus, high ridge and web function samples as CSV");
  add_common(geometry, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : inflap::kExitConfig;
  }

  if (*solve) return inflap::cmd_solve(options(solve, common), std::cerr);
  if (*verify) return inflap::cmd_verify(options(verify, common), suite, std::cerr);
  if (*serrin) return inflap::cmd_serrin(options(serrin, common), std::cerr);
  if (*geometry) return inflap::cmd_geometry(options(geometry, common), std::cerr);

  std::vector<inflap::Vec2> pts;
  for (const auto& s : starts) {
    std::istringstream in(s);
    double x = 0.0, y = 0.0;
    char comma = 0;
    if (!(in >> x >> comma >> y) || comma != ',' || !in.eof()) {
      std::cerr << "error: --start expects x,y, got '" << s << "'\n";
      return inflap::kExitConfig;
    }
    pts.emplace_back(x, y);
  }
  return inflap::cmd_flow(options(flow, common), pts, std::cerr);
}
