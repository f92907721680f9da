#include "inflap/errors.hpp"
#include "inflap/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace inflap;

namespace {

int node_at(const Grid& g, const Vec2& p) {
  for (int k = 0; k < g.size(); ++k) {
    if ((g.node(k) - p).norm() < 1e-9) return k;
  }
  return -1;
}

double rel_linf(const ScalarField& u, const Domain& d) {
  double e = 0.0;
  for (int k = 0; k < u.grid->size(); ++k) {
    if (u.grid->inside(k)) e = std::max(e, std::abs(u[k] - web_function(d, u.grid->node(k))));
  }
  return e / (kWebConstant * std::pow(d.inradius(), 4.0 / 3.0));
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.residual_tol = 0;
  CHECK_THROWS_AS(c.validate(), ConfigurationError);
  c = SolverConfig{};
  c.max_iters = 0;
  CHECK_THROWS_AS(c.validate(), ConfigurationError);
  c = SolverConfig{};
  c.pseudo_dt_safety = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigurationError);
  c = SolverConfig{};
  CHECK(c.degenerate_tol(0.001) == doctest::Approx(0.01));
}

TEST_CASE("operator on a quadratic") {
  // u = x^2: grad u . D^2u grad u = 8 x^2, which is 2 at x = 0.5.
  const GridPtr g = build_grid(Domain::rectangle({-2, -2}, {2, 2}), 128);
  const ScalarField u = ScalarField::sample(g, [](const Vec2& p) { return p.x() * p.x(); });
  const int k = node_at(*g, {0.5, 0.0});
  REQUIRE(k >= 0);
  const double v = discrete_infinity_laplacian(u, k, SolverConfig{});
  CHECK(std::abs(v - 2.0) < 4 * g->h());
}

TEST_CASE("operator on an affine field") {
  const GridPtr g = build_grid(Domain::ball({0, 0}, 1), 64);
  const ScalarField u = ScalarField::sample(g, [](const Vec2& p) { return 0.3 * p.x() - 1.1 * p.y() + 2; });
  for (const Vec2& p : {Vec2(0, 0), Vec2(0.25, -0.125), Vec2(-0.5, 0.25)}) {
    const int k = node_at(*g, p);
    REQUIRE(k >= 0);
    CHECK(std::abs(discrete_infinity_laplacian(u, k, SolverConfig{})) < 1e-9);
  }
}

TEST_CASE("operator on the ball web function") {
  const Domain ball = Domain::ball({0, 0}, 1);
  for (int res : {64, 128}) {
    const GridPtr g = build_grid(ball, res);
    const ScalarField phi = web_field(g);
    const int k = node_at(*g, {0.5, 0.0});
    REQUIRE(k >= 0);
    CHECK(std::abs(discrete_infinity_laplacian(phi, k, SolverConfig{}) + 1.0) < 2 * std::pow(g->h(), 2.0 / 3.0));
  }
}

TEST_CASE("residual of the zero field") {
  const GridPtr g = build_grid(Domain::ellipse({0, 0}, 1.5, 1), 48);
  ScalarField zero = ScalarField::sample(g, [](const Vec2&) { return 0.0; }, Extension::DirichletZero);
  const ScalarField r = residual_field(zero, SolverConfig{});
  for (int k = 0; k < g->size(); ++k) {
    if (!g->inside(k) || g->signed_distance(k) < 2 * g->h()) {
      CHECK(std::isnan(r[k]));
    } else {
      CHECK(r[k] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("web function is not a solution on the ellipse") {
  const Domain e = Domain::ellipse({0, 0}, 1.5, 1);
  const GridPtr g = build_grid(e, 96);
  const ScalarField r = residual_field(web_field(g), SolverConfig{});
  double near_cut = 0.0, finite_max = 0.0;
  for (int k = 0; k < g->size(); ++k) {
    if (std::isnan(r[k])) continue;
    finite_max = std::max(finite_max, r[k]);
    const Vec2 p = g->node(k);
    if (std::abs(p.y()) < 2 * g->h() && std::abs(p.x()) < 0.7) near_cut = std::max(near_cut, r[k]);
  }
  CHECK(std::isfinite(finite_max));
  CHECK(near_cut > 0.2);
}

TEST_CASE("ball solve") {
  const Domain ball = Domain::ball({0, 0}, 1);
  const GridPtr g = build_grid(ball, 64);
  const SolveResult r = solve_dirichlet(ball, g, SolverConfig{});
  CHECK(r.converged);
  CHECK(r.final_residual <= SolverConfig{}.residual_tol);
  CHECK(std::abs(r.u.max_inside() / kWebConstant - 1.0) < 0.03);
  CHECK(r.u.mask_consistent());
  for (int k = 0; k < g->size(); ++k) {
    if (g->inside(k)) CHECK(r.u[k] > 0.0);
  }
  const BoundaryGradient bg = boundary_gradient(r.u, ball, 128);
  CHECK(bg.samples.size() + bg.skipped == 128);
  for (const auto& s : bg.samples) CHECK(std::abs(s.grad_norm / std::cbrt(3.0) - 1.0) < 0.05);
  const ScalarField res = residual_field(r.u, SolverConfig{});
  double worst = 0.0;
  for (double v : res.values) {
    if (!std::isnan(v)) worst = std::max(worst, v);
  }
  CHECK(worst <= SolverConfig{}.residual_tol);
}

TEST_CASE("refinement reduces the ball error") {
  const Domain ball = Domain::ball({0, 0}, 1);
  const double e32 = rel_linf(solve_dirichlet(ball, build_grid(ball, 32), SolverConfig{}).u, ball);
  const double e64 = rel_linf(solve_dirichlet(ball, build_grid(ball, 64), SolverConfig{}).u, ball);
  CHECK(e64 < e32);
  CHECK(std::log2(e32 / e64) >= 0.5);
}

TEST_CASE("stadium solve stays between inscribed and enclosing web functions") {
  const Domain s = Domain::stadium({-1, 0}, {1, 0}, 1);
  const GridPtr g = build_grid(s, 64);
  const SolveResult r = solve_dirichlet(s, g, SolverConfig{});
  REQUIRE(r.converged);
  const double h = g->h();
  for (const auto& c : s.high_ridge().sample(0.25)) {
    const Domain b = Domain::ball(c, 1.0);
    for (int k = 0; k < g->size(); ++k) {
      if (!g->inside(k) || b.signed_distance(g->node(k)) <= 0.0) continue;
      CHECK(r.u[k] >= web_function(b, g->node(k)) - 10 * h);
    }
  }
  for (int k = 0; k < g->size(); ++k) {
    if (g->inside(k)) CHECK(r.u[k] <= web_function(s, g->node(k)) + 10 * h);
  }
}

TEST_CASE("solves are deterministic") {
  const Domain e = Domain::ellipse({0, 0}, 1.5, 1);
  const GridPtr g = build_grid(e, 40);
  const SolveResult a = solve_dirichlet(e, g, SolverConfig{});
  const SolveResult b = solve_dirichlet(e, g, SolverConfig{});
  CHECK(a.iterations == b.iterations);
  CHECK(std::memcmp(a.u.values.data(), b.u.values.data(), a.u.values.size() * sizeof(double)) == 0);
}

TEST_CASE("non-convergence is reported") {
  const Domain ball = Domain::ball({0, 0}, 1);
  SolverConfig c;
  c.max_iters = 1;
  c.residual_tol = 1e-12;
  const SolveResult r = solve_dirichlet(ball, build_grid(ball, 32), c);
  CHECK_FALSE(r.converged);
  CHECK(r.final_residual > c.residual_tol);
  CHECK(r.diagnostics.find("max_iters") != std::string::npos);
}

TEST_CASE("grid must belong to the domain") {
  const GridPtr g = build_grid(Domain::ball({0, 0}, 1), 32);
  CHECK_THROWS_AS(solve_dirichlet(Domain::ellipse({0, 0}, 1.5, 1), g, SolverConfig{}), InvalidInput);
}

}  // TEST_SUITE
