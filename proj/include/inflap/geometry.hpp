#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace inflap {

using Vec2 = Eigen::Vector2d;

/// c0 = 3^{4/3}/4, the amplitude of the web solution profile.
inline const double kWebConstant = std::pow(3.0, 4.0 / 3.0) / 4.0;

struct Ball {
  Vec2 center;
  double radius;
};

/// Parallel neighbourhood {dist(x, [a,b]) < radius} of a segment.
struct Stadium {
  Vec2 a;
  Vec2 b;
  double radius;
};

/// Axis-aligned ellipse, semi_a along x, semi_a >= semi_b.
struct Ellipse {
  Vec2 center;
  double semi_a;
  double semi_b;
};

/// Strictly convex polygon, counterclockwise vertices.
struct ConvexPolygon {
  std::vector<Vec2> vertices;
};

struct Segment {
  Vec2 a;
  Vec2 b;

  double length() const { return (b - a).norm(); }
  double distance_to(const Vec2& p) const;
};

/// A union of segments; isolated points are zero-length segments.
struct Locus {
  std::vector<Segment> segments;

  /// Points along every segment with spacing at most `spacing` (endpoints included).
  std::vector<Vec2> sample(double spacing) const;
  double distance_to(const Vec2& p) const;
};

double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

struct DistanceProbe {
  Vec2 point;
  double distance = 0.0;
  /// Local minimisers of |point - y| over the boundary whose distance is within
  /// the requested slack of the global minimum.
  std::vector<Vec2> nearest_boundary_points;
};

struct BoundarySample {
  Vec2 point;
  Vec2 inward_normal;
};

struct BoundingBox {
  Vec2 lo;
  Vec2 hi;
};

class Domain {
 public:
  using Shape = std::variant<Ball, Stadium, Ellipse, ConvexPolygon>;

  static Domain ball(const Vec2& center, double radius);
  /// A zero-length core segment yields a Ball.
  static Domain stadium(const Vec2& a, const Vec2& b, double radius);
  static Domain ellipse(const Vec2& center, double semi_a, double semi_b);
  static Domain polygon(std::vector<Vec2> vertices);
  static Domain rectangle(const Vec2& lo, const Vec2& hi);

  const Shape& shape() const { return shape_; }
  std::string kind() const;

  double signed_distance(const Vec2& p) const;
  DistanceProbe probe(const Vec2& p, double slack = 0.0) const;
  double inradius() const;
  BoundingBox bounding_box() const;
  double area() const;
  double perimeter() const;

  /// `count` boundary points equally spaced in arclength.
  std::vector<BoundarySample> boundary_samples(int count) const;

  /// Exact high ridge {d = rho}.
  Locus high_ridge() const;
  /// Exact cut locus (closure of the singular set of the distance function).
  Locus cut_locus() const;

 private:
  explicit Domain(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

// Free-function surface mirroring the operations of the geometry module.

double signed_distance(const Domain& domain, const Vec2& point);
double inradius(const Domain& domain);
Locus high_ridge(const Domain& domain);
Locus cut_locus(const Domain& domain);

struct CutHighComparison {
  bool equal = false;
  double hausdorff = 0.0;
};

CutHighComparison cut_equals_high_ridge(const Domain& domain, double hausdorff_tol);

/// phi(x) = c0 [rho^{4/3} - (rho - d(x))^{4/3}]; throws DomainError outside the closure.
double web_function(const Domain& domain, const Vec2& point);

struct DiametralBall {
  bool found = false;
  Vec2 center = Vec2::Zero();
  Vec2 y_plus = Vec2::Zero();
  Vec2 y_minus = Vec2::Zero();
};

/// Looks for an inscribed ball of radius rho touching the boundary at two
/// antipodal points (midpoint within `tol` of the centre).
DiametralBall diametral_ball_check(const Domain& domain, double tol);

}  // namespace inflap
