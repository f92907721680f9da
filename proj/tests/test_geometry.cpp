#include "inflap/errors.hpp"
#include "inflap/geometry.hpp"
#include "inflap/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace inflap;

namespace {

constexpr double kPi = std::numbers::pi;

// Brute-force distance from p to the ellipse boundary over n parameter samples.
double sampled_ellipse_distance(const Vec2& p, double a, double b, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    best = std::min(best, (Vec2(a * std::cos(t), b * std::sin(t)) - p).norm());
  }
  return best;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("signed distance of the unit ball") {
  const Domain ball = Domain::ball({0, 0}, 1);
  CHECK(signed_distance(ball, {0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(signed_distance(ball, {2, 0}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(signed_distance(ball, {0, 1}) == doctest::Approx(0.0));
}

TEST_CASE("ellipse distance matches dense boundary sampling") {
  const Domain e = Domain::ellipse({0, 0}, 1.5, 1);
  CHECK(std::abs(signed_distance(e, {0, 0}) - sampled_ellipse_distance({0, 0}, 1.5, 1, 1000000)) < 1e-9);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-1.4, 1.4), uy(-0.9, 0.9);
  for (int i = 0; i < 20; ++i) {
    const Vec2 p(ux(rng), uy(rng));
    if (signed_distance(e, p) <= 0.0) continue;
    // Sampling error is quadratic in the parameter step.
    CHECK(std::abs(signed_distance(e, p) - sampled_ellipse_distance(p, 1.5, 1, 200000)) < 1e-8);
  }
}

TEST_CASE("non-finite coordinates are rejected") {
  const Domain ball = Domain::ball({0, 0}, 1);
  CHECK_THROWS_AS(signed_distance(ball, {std::nan(""), 0}), InvalidInput);
  CHECK_THROWS_AS(Domain::ball({0, 0}, -1), InvalidInput);
  CHECK_THROWS_AS(Domain::ellipse({0, 0}, 1, 2), InvalidInput);
  CHECK_THROWS_AS(Domain::polygon({{0, 0}, {1, 1}, {2, 2}}), InvalidInput);
  CHECK_THROWS_AS(Domain::polygon({{0, 0}, {0, 1}, {1, 0}}), InvalidInput);  // clockwise
}

TEST_CASE("inradius") {
  CHECK(inradius(Domain::ball({0, 0}, 2)) == 2.0);
  CHECK(inradius(Domain::rectangle({-1, -1}, {1, 1})) == doctest::Approx(1.0).epsilon(1e-12));
  // Oracle: maximum of sampled distances, refined by a local search.
  const Domain e = Domain::ellipse({0, 0}, 1.5, 1);
  double best = 0.0;
  for (int i = -60; i <= 60; ++i) {
    for (int j = -40; j <= 40; ++j) {
      const Vec2 p(0.02 * i, 0.02 * j);
      if (signed_distance(e, p) > 0.0) best = std::max(best, sampled_ellipse_distance(p, 1.5, 1, 4000));
    }
  }
  CHECK(inradius(e) == doctest::Approx(best).epsilon(1e-6));
  CHECK(inradius(e) == 1.0);
  // Regular hexagon of circumradius 1: apothem cos(pi/6).
  std::vector<Vec2> hex;
  for (int k = 0; k < 6; ++k) hex.emplace_back(std::cos(k * kPi / 3), std::sin(k * kPi / 3));
  CHECK(inradius(Domain::polygon(hex)) == doctest::Approx(std::cos(kPi / 6)).epsilon(1e-9));
}

TEST_CASE("degenerate stadium is a ball") {
  const Domain s = Domain::stadium({0.5, 0}, {0.5, 0}, 1);
  CHECK(s.kind() == "ball");
}

TEST_CASE("high ridge") {
  const Locus b = high_ridge(Domain::ball({0, 0}, 1));
  REQUIRE(b.segments.size() == 1);
  CHECK(b.segments[0].length() == 0.0);
  CHECK(b.distance_to({0, 0}) == 0.0);
  const Locus s = high_ridge(Domain::stadium({-1, 0}, {1, 0}, 1));
  CHECK(s.distance_to({-1, 0}) < 1e-15);
  CHECK(s.distance_to({1, 0}) < 1e-15);
  CHECK(s.distance_to({0, 0.1}) == doctest::Approx(0.1));
  // Oracle: argmax of sampled distance.
  const Domain e = Domain::ellipse({0, 0}, 1.5, 1);
  Vec2 arg(1, 1);
  double best = -1.0;
  for (int i = -30; i <= 30; ++i) {
    for (int j = -20; j <= 20; ++j) {
      const Vec2 p(0.05 * i, 0.05 * j);
      const double d = signed_distance(e, p);
      if (d > best) best = d, arg = p;
    }
  }
  CHECK(high_ridge(e).distance_to(arg) < 1e-12);
}

TEST_CASE("cut locus of the ellipse agrees with nearest-point multiplicity") {
  const double a = 1.5, b = 1.0;
  const Domain e = Domain::ellipse({0, 0}, a, b);
  // Oracle: on the major axis, the nearest boundary points split into a
  // symmetric pair above and below the axis exactly on the cut segment.
  auto nearest_y = [&](double x) {
    double best = std::numeric_limits<double>::infinity(), y = 0.0;
    for (int i = 0; i < 200000; ++i) {
      const double t = kPi * i / 200000;  // upper half suffices by symmetry
      const Vec2 q(a * std::cos(t), b * std::sin(t));
      const double d = (q - Vec2(x, 0)).norm();
      if (d < best) best = d, y = q.y();
    }
    return y;
  };
  double end = 0.0;
  for (double x = 0.0; x < 1.2; x += 0.005) {
    if (nearest_y(x) > 0.05) end = x;
  }
  const Locus cut = cut_locus(e);
  double extent = 0.0;
  for (const auto& p : cut.sample(1e-3)) extent = std::max(extent, std::abs(p.x()));
  CHECK(extent == doctest::Approx((a * a - b * b) / a).epsilon(1e-12));
  CHECK(std::abs(extent - end) < 0.02);
}

TEST_CASE("cut locus of the square is its diagonals") {
  const Domain sq = Domain::rectangle({-1, -1}, {1, 1});
  const Locus cut = cut_locus(sq);
  std::vector<Vec2> oracle;
  for (int i = -100; i <= 100; ++i) {
    oracle.emplace_back(0.01 * i, 0.01 * i);
    oracle.emplace_back(0.01 * i, -0.01 * i);
  }
  const auto samples = cut.sample(0.01);
  for (const auto& p : samples) CHECK(std::abs(std::abs(p.x()) - std::abs(p.y())) < 1e-12);
  CHECK(hausdorff_distance(samples, oracle) < 0.011);
}

TEST_CASE("cut locus equals high ridge") {
  const double h = 0.03;
  auto ball = cut_equals_high_ridge(Domain::ball({0, 0}, 1), 2 * h);
  CHECK(ball.equal);
  auto stadium = cut_equals_high_ridge(Domain::stadium({-1, 0}, {1, 0}, 1), 2 * h);
  CHECK(stadium.equal);
  auto ellipse = cut_equals_high_ridge(Domain::ellipse({0, 0}, 1.5, 1), 2 * h);
  CHECK_FALSE(ellipse.equal);
  CHECK(ellipse.hausdorff == doctest::Approx(2.5 / 3.0).epsilon(1e-9));
  CHECK_FALSE(cut_equals_high_ridge(Domain::ellipse({0, 0}, 1.2, 1), 2 * h).equal);
}

TEST_CASE("web function") {
  const Domain ball = Domain::ball({0, 0}, 1);
  const double c0 = std::pow(3.0, 4.0 / 3.0) / 4.0;
  CHECK(c0 == doctest::Approx(1.0816871).epsilon(1e-7));
  CHECK(web_function(ball, {0, 0}) == doctest::Approx(c0).epsilon(1e-14));
  CHECK(web_function(ball, {1, 0}) == doctest::Approx(0.0));
  // d = 0.488, rho - d = 0.512 = 0.8^3, so (rho - d)^{4/3} = 0.8^4.
  CHECK(web_function(ball, {0.512, 0}) == doctest::Approx(c0 * (1 - std::pow(0.8, 4))).epsilon(1e-13));
  CHECK(web_function(ball, {0.512, 0}) == doctest::Approx(0.63866).epsilon(1e-4));
  CHECK_THROWS_AS(web_function(ball, {1.5, 0}), DomainError);
  const Domain s = Domain::stadium({-1, 0}, {1, 0}, 1);
  for (double x : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    CHECK(std::abs(web_function(s, {x, 0}) - c0) < 1e-12);
  }
}

TEST_CASE("diametral ball") {
  const double tol = 0.03;
  const auto b = diametral_ball_check(Domain::ball({0, 0}, 1), tol);
  CHECK(b.found);
  CHECK(((b.y_plus + b.y_minus) / 2 - b.center).norm() <= tol);
  const auto s = diametral_ball_check(Domain::stadium({-1, 0}, {1, 0}, 1), tol);
  CHECK(s.found);
  CHECK(std::abs(std::abs(s.y_plus.y()) - 1.0) < 1e-9);
  CHECK(std::abs(s.y_plus.y() + s.y_minus.y()) < 1e-9);
  const auto e = diametral_ball_check(Domain::ellipse({0, 0}, 1.5, 1), tol);
  CHECK(e.found);
  CHECK(e.center.norm() < 1e-9);
  CHECK(std::abs(std::abs(e.y_plus.y()) - 1.0) < 1e-9);
}

TEST_CASE("distance is 1-Lipschitz") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const Domain shapes[] = {Domain::ball({0, 0}, 1), Domain::stadium({-1, 0}, {1, 0}, 1),
                           Domain::ellipse({0, 0}, 1.5, 1), Domain::rectangle({-1, -1}, {1, 1})};
  for (const auto& d : shapes) {
    for (int i = 0; i < 2000; ++i) {
      const Vec2 p(u(rng), u(rng)), q(u(rng), u(rng));
      CHECK(std::abs(d.signed_distance(p) - d.signed_distance(q)) <= (p - q).norm() + 1e-12);
    }
  }
}

TEST_CASE("eikonal away from the boundary and the cut locus") {
  for (const auto& d : {Domain::stadium({-1, 0}, {1, 0}, 1), Domain::ellipse({0, 0}, 1.5, 1)}) {
    const GridPtr g = build_grid(d, 64);
    const double h = g->h();
    const auto cut = cut_locus_mask(*g, 0.2);
    const auto dist_cut = distance_to_mask(*g, cut);
    for (int j = 1; j + 1 < g->ny(); ++j) {
      for (int i = 1; i + 1 < g->nx(); ++i) {
        const int k = g->index(i, j);
        if (!g->inside(k) || g->signed_distance(k) <= 2 * h || dist_cut[k] <= 2 * h) continue;
        const double dx = (g->signed_distance(g->index(i + 1, j)) - g->signed_distance(g->index(i - 1, j))) / (2 * h);
        const double dy = (g->signed_distance(g->index(i, j + 1)) - g->signed_distance(g->index(i, j - 1))) / (2 * h);
        CHECK(std::abs(std::hypot(dx, dy) - 1.0) <= 10 * h);
      }
    }
  }
}

TEST_CASE("web function is zero on the boundary and peaks on the high ridge") {
  for (const auto& d : {Domain::ball({0.3, -0.2}, 1.3), Domain::stadium({-1, 0}, {1, 0.5}, 0.8),
                        Domain::ellipse({0, 0}, 1.5, 1), Domain::rectangle({-1, -1}, {2, 1})}) {
    const double peak = std::pow(3.0, 4.0 / 3.0) / 4.0 * std::pow(d.inradius(), 4.0 / 3.0);
    for (const auto& s : d.boundary_samples(64)) CHECK(std::abs(web_function(d, s.point)) < 1e-9);
    for (const auto& p : d.high_ridge().sample(0.05)) CHECK(std::abs(web_function(d, p) - peak) < 1e-12);
    for (const auto& s : d.boundary_samples(64)) CHECK(web_function(d, s.point + 0.05 * s.inward_normal) > 0.0);
  }
}

}  // TEST_SUITE
