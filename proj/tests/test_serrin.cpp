#include "inflap/serrin.hpp"

#include <doctest.h>

#include <cmath>

using namespace inflap;

TEST_SUITE("serrin") {

TEST_CASE("tolerances scale with h") {
  const SerrinTolerances t128 = SerrinTolerances::for_resolution(128);
  CHECK(t128.a_rel == doctest::Approx(0.05));
  CHECK(t128.p_rel == doctest::Approx(0.05));
  CHECK(SerrinTolerances::for_resolution(256).a_rel == doctest::Approx(0.025));
}

TEST_CASE("web agreement of the web function is exact") {
  const Domain s = Domain::stadium({-1, 0}, {1, 0}, 1);
  const GridPtr g = build_grid(s, 64);
  const WebAgreement w = web_agreement(web_field(g), s);
  CHECK(w.nodes > 0);
  CHECK(w.linf < 1e-14);
  ScalarField off = web_field(g);
  for (auto& v : off.values) v *= 1.1;
  CHECK(web_agreement(off, s).linf == doctest::Approx(0.1 / 1.1).epsilon(1e-9));
}

TEST_CASE("stadium reconstruction") {
  const Domain s = Domain::stadium({-1, 0}, {1, 0}, 1);
  const GridPtr g = build_grid(s, 128);
  const auto r = stadium_reconstruct(*g);
  REQUIRE(r.has_value());
  CHECK_FALSE(r->degenerate);
  const double h = g->h();
  const Vec2 lo = r->stadium.a.x() < r->stadium.b.x() ? r->stadium.a : r->stadium.b;
  const Vec2 hi = r->stadium.a.x() < r->stadium.b.x() ? r->stadium.b : r->stadium.a;
  CHECK((lo - Vec2(-1, 0)).norm() <= 2 * h);
  CHECK((hi - Vec2(1, 0)).norm() <= 2 * h);
  CHECK(r->boundary_hausdorff <= 2 * h);

  const GridPtr gb = build_grid(Domain::ball({0, 0}, 1), 128);
  const auto b = stadium_reconstruct(*gb);
  REQUIRE(b.has_value());
  CHECK(b->degenerate);
  CHECK(b->stadium.a.norm() <= gb->h());
  CHECK(b->boundary_hausdorff <= 2 * gb->h());

  CHECK_FALSE(stadium_reconstruct(*build_grid(Domain::ellipse({0, 0}, 1.5, 1), 64)).has_value());
}

TEST_CASE("diagnosis of ball and ellipse") {
  const SerrinReport ball = serrin_diagnose(Domain::ball({0, 0}, 1), 64, SolverConfig{},
                                            SerrinTolerances::for_resolution(64));
  CHECK(ball.verdict == SerrinVerdict::consistent_web_domain);
  CHECK(ball.cut_high_verdict);
  CHECK(std::abs(ball.a / std::cbrt(3.0) - 1.0) < 0.05);
  CHECK(ball.classification_note.find("ball") != std::string::npos);

  const SerrinReport e = serrin_diagnose(Domain::ellipse({0, 0}, 1.5, 1), 64, SolverConfig{},
                                         SerrinTolerances::for_resolution(64));
  CHECK(e.verdict == SerrinVerdict::inconsistent);
  CHECK_FALSE(e.cut_high_verdict);
  CHECK(e.diametral.found);
  CHECK_FALSE(e.reconstruction.has_value());

  const Json j = e.to_json();
  CHECK(j["verdict"] == "inconsistent");
  CHECK(j["paper_tags"].size() > 0);
  bool assumed = false;
  for (const auto& f : j["hypothesis_flags"]) assumed = assumed || f == "Hu_assumed";
  CHECK(assumed);
}

TEST_CASE("polygon runs carry the unverified regularity flag") {
  const SerrinReport r = serrin_diagnose(Domain::rectangle({-1, -1}, {1, 1}), 32, SolverConfig{},
                                         SerrinTolerances::for_resolution(32));
  bool unverified = false;
  for (const auto& f : r.hypothesis_flags) unverified = unverified || f == "Hu_unverified";
  CHECK(unverified);
  CHECK(r.verdict == SerrinVerdict::inconsistent);
}

TEST_CASE("a solver that stops early gives no verdict") {
  SolverConfig c;
  c.max_iters = 1;
  c.residual_tol = 1e-12;
  const SerrinReport r = serrin_diagnose(Domain::ball({0, 0}, 1), 32, c, SerrinTolerances::for_resolution(32));
  CHECK(r.verdict == SerrinVerdict::inconclusive);
  CHECK_FALSE(r.solver_converged);
}

}  // TEST_SUITE
