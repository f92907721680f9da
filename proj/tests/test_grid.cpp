#include "inflap/errors.hpp"
#include "inflap/field_io.hpp"
#include "inflap/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>

using namespace inflap;

TEST_SUITE("grid") {

TEST_CASE("grid construction") {
  const GridPtr g = build_grid(Domain::ball({0, 0}, 1), 64);
  CHECK(g->nx() * g->ny() >= 66 * 66);
  CHECK(g->h() == doctest::Approx(2.0 / 64));
  // Margin of at least two outside nodes around the bounding box.
  CHECK(g->origin().x() <= -1.0 - 2 * g->h());
  CHECK(g->node(g->nx() - 1, 0).x() >= 1.0 + 2 * g->h());

  const GridPtr s = build_grid(Domain::stadium({-1, 0}, {1, 0}, 1), 128);
  const double area = std::numbers::pi + 4.0;  // pi r^2 + 2 len r
  CHECK(std::abs(s->inside_count() * s->h() * s->h() / area - 1.0) < 0.03);

  CHECK_NOTHROW(build_grid(Domain::ellipse({0, 0}, 1.5, 1), 32));
  CHECK_THROWS_AS(build_grid(Domain::ball({0, 0}, 1), 8), ConfigurationError);
  CHECK_THROWS_AS(build_grid(Domain::stadium({-10, 0}, {10, 0}, 1), 64), ConfigurationError);
}

TEST_CASE("cut-cell fractions locate the boundary") {
  const Domain ball = Domain::ball({0, 0}, 1);
  const GridPtr g = build_grid(ball, 64);
  const double h = g->h();
  for (int k = 0; k < g->size(); ++k) {
    if (!g->inside(k)) continue;
    const Vec2 p = g->node(k);
    const Vec2 step[4] = {{h, 0}, {-h, 0}, {0, h}, {0, -h}};
    for (int a = 0; a < 4; ++a) {
      const double t = g->theta(k)[a];
      CHECK(t > 0.0);
      CHECK(t <= 1.0);
      if (t < 1.0) CHECK(std::abs(ball.signed_distance(p + t * step[a])) < 1e-10 * h);
    }
  }
}

TEST_CASE("gradient") {
  const GridPtr g = build_grid(Domain::ball({0, 0}, 1), 64);
  const ScalarField affine = ScalarField::sample(g, [](const Vec2& p) { return 2 * p.x() + 3 * p.y(); });
  const VectorField ga = gradient(affine);
  for (int k = 0; k < g->size(); ++k) {
    if (!g->inside(k)) continue;
    CHECK(ga[k].x() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ga[k].y() == doctest::Approx(3.0).epsilon(1e-12));
  }
  const ScalarField c = ScalarField::sample(g, [](const Vec2&) { return 4.0; });
  const VectorField gc = gradient(c);
  for (int k = 0; k < g->size(); ++k) {
    if (g->inside(k)) CHECK(gc[k].norm() < 1e-12);
  }
}

TEST_CASE("gradient of the ball web function") {
  const Domain ball = Domain::ball({0, 0}, 1);
  // |grad phi| = (4/3) c0 (rho - d)^{1/3} = 3^{1/3} |x|^{1/3}.
  const double exact = std::cbrt(3.0 * 0.5);
  CHECK(exact == doctest::Approx(1.1447).epsilon(1e-4));
  double prev = 1e9;
  for (int res : {64, 128}) {
    const GridPtr g = build_grid(ball, res);
    const ScalarField phi = ScalarField::sample(g, [&](const Vec2& p) { return web_function(ball, p); },
                                                Extension::DirichletZero);
    const VectorField gp = gradient(phi);
    int k = -1;
    for (int q = 0; q < g->size(); ++q) {
      if ((g->node(q) - Vec2(0.5, 0)).norm() < 1e-9) k = q;
    }
    REQUIRE(k >= 0);
    const double err = std::abs(gp[k].norm() - exact);
    CHECK(err < g->h());
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("interpolation") {
  const Domain ball = Domain::ball({0, 0}, 1);
  const GridPtr g = build_grid(ball, 64);
  const ScalarField affine = ScalarField::sample(g, [](const Vec2& p) { return 1.0 - p.x() + 0.5 * p.y(); });
  for (int k = 0; k < g->size(); k += 7) {
    if (g->inside(k)) CHECK(interpolate(affine, g->node(k)) == affine[k]);
  }
  for (const Vec2& p : {Vec2(0.1234, -0.4321), Vec2(-0.7, 0.2), Vec2(0.3, 0.3)}) {
    CHECK(interpolate(affine, p) == doctest::Approx(1.0 - p.x() + 0.5 * p.y()).epsilon(1e-12));
  }
  const ScalarField phi = ScalarField::sample(g, [&](const Vec2& p) { return web_function(ball, p); },
                                              Extension::DirichletZero);
  const double h = g->h();
  CHECK(std::abs(interpolate(phi, {0.25, 0.25}) - web_function(ball, {0.25, 0.25})) < 4 * h * h);
  CHECK_THROWS_AS(interpolate(phi, {3.0, 0.0}), DomainError);
}

TEST_CASE("convex envelope") {
  const GridPtr g = build_grid(Domain::ball({0, 0}, 1), 32);
  const ScalarField q = ScalarField::sample(g, [](const Vec2& p) { return p.squaredNorm(); });
  const ScalarField eq = convex_envelope(q);
  for (int k = 0; k < g->size(); ++k) {
    if (g->inside(k)) CHECK(std::abs(eq[k] - q[k]) < 1e-12);
  }
  // Concave cap: envelope is the plane through the rim values.
  const ScalarField cap = ScalarField::sample(g, [](const Vec2& p) { return -p.squaredNorm(); });
  const ScalarField ec = convex_envelope(cap);
  double rim = 0.0;
  for (int k = 0; k < g->size(); ++k) {
    if (g->inside(k)) rim = std::min(rim, cap[k]);
  }
  for (int k = 0; k < g->size(); ++k) {
    if (!g->inside(k)) continue;
    CHECK(ec[k] <= cap[k] + 1e-12);
    CHECK(ec[k] == doctest::Approx(rim).epsilon(1e-9));
  }
  // Idempotent, and the output is convex.
  const ScalarField twice = convex_envelope(ec);
  for (int k = 0; k < g->size(); ++k) {
    if (g->inside(k)) CHECK(std::abs(twice[k] - ec[k]) < 1e-12);
  }
  ScalarField neg = ec;
  for (auto& v : neg.values) v = -v;
  CHECK(midpoint_concavity_deficit(neg, 2000, 1).worst <= 1e-9);
}

TEST_CASE("ridge functions in one variable") {
  const GridPtr g = build_grid(Domain::rectangle({-0.5, -0.5}, {1.5, 0.5}), 32);
  const ScalarField ridge = ScalarField::sample(g, [](const Vec2& p) { return std::max(-p.x(), p.x() - 1.0); });
  const ScalarField er = convex_envelope(ridge);
  for (int k = 0; k < g->size(); ++k) {
    if (g->inside(k)) CHECK(std::abs(er[k] - ridge[k]) < 1e-12);
  }
  // Negation: the chord between the extreme columns.
  const ScalarField cap = ScalarField::sample(g, [](const Vec2& p) { return std::min(p.x(), 1.0 - p.x()); });
  const ScalarField ec = convex_envelope(cap);
  double xmin = 1e9, xmax = -1e9;
  for (int k = 0; k < g->size(); ++k) {
    if (g->inside(k)) xmin = std::min(xmin, g->node(k).x()), xmax = std::max(xmax, g->node(k).x());
  }
  const double f0 = std::min(xmin, 1.0 - xmin), f1 = std::min(xmax, 1.0 - xmax);
  for (int k = 0; k < g->size(); ++k) {
    if (!g->inside(k)) continue;
    const double x = g->node(k).x();
    CHECK(ec[k] == doctest::Approx(f0 + (f1 - f0) * (x - xmin) / (xmax - xmin)).epsilon(1e-9));
  }
}

TEST_CASE("concavity deficit") {
  const GridPtr g = build_grid(Domain::ball({0, 0}, 1), 64);
  const ScalarField f = ScalarField::sample(g, [](const Vec2& p) { return -p.squaredNorm(); });
  const ConcavityDeficit d = midpoint_concavity_deficit(f, 5000, 11);
  CHECK(d.samples == 5000);
  CHECK(d.worst <= g->h() * g->h());
  const ScalarField conv = ScalarField::sample(g, [](const Vec2& p) { return p.squaredNorm(); });
  CHECK(midpoint_concavity_deficit(conv, 5000, 11).worst > 0.1);
  // Seeded: equal seeds, equal witnesses.
  const ConcavityDeficit a = midpoint_concavity_deficit(conv, 1000, 5), b = midpoint_concavity_deficit(conv, 1000, 5);
  CHECK(a.worst == b.worst);
  CHECK(a.x == b.x);
  CHECK_THROWS_AS(midpoint_concavity_deficit(f, 10, 1), InvalidInput);
}

TEST_CASE("field files round-trip bit-exactly") {
  const Domain e = Domain::ellipse({0.1, -0.2}, 1.5, 1);
  const GridPtr g = build_grid(e, 48);
  const ScalarField f = ScalarField::sample(g, [&](const Vec2& p) { return std::sin(7 * p.x()) / 3 + p.y() * 1e-17; });
  const auto path = std::filesystem::temp_directory_path() / "inflap_roundtrip.iglfield";
  write_field(path, f);
  const FieldFile file = read_field(path);
  CHECK(file.nx == g->nx());
  CHECK(file.ny == g->ny());
  const double h = g->h();
  CHECK(std::memcmp(&file.h, &h, sizeof(double)) == 0);
  const ScalarField back = to_scalar_field(file, g, Extension::Extrapolate);
  for (int k = 0; k < g->size(); ++k) {
    if (g->inside(k)) {
      CHECK(std::memcmp(&back.values[k], &f.values[k], sizeof(double)) == 0);
    } else {
      CHECK(std::isnan(back[k]));
    }
  }
  CHECK(format_field(back) == format_field(f));
  std::filesystem::remove(path);
  CHECK(format_field(f).rfind("IGLFIELD 1\n", 0) == 0);
  CHECK_THROWS_AS(to_scalar_field(file, build_grid(e, 64), Extension::Extrapolate), ConfigurationError);
}

}  // TEST_SUITE
