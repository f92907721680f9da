#include "inflap/geometry.hpp"

#include "inflap/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>

namespace inflap {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(const Vec2& p, const char* what) {
  if (!std::isfinite(p.x()) || !std::isfinite(p.y())) {
    throw InvalidInput(std::string(what) + ": non-finite coordinates");
  }
}

Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 closest_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return a + t * d;
}

// Keeps candidates whose distance lies within `slack` of the smallest one.
DistanceProbe finish_probe(const Vec2& p, double distance, std::vector<std::pair<double, Vec2>> cands,
                           double slack) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) best = std::min(best, c.first);
  DistanceProbe out;
  out.point = p;
  out.distance = distance;
  const double cut = best + slack + 1e-12 * (1.0 + best);
  for (const auto& c : cands) {
    if (c.first > cut) continue;
    bool dup = false;
    for (const auto& q : out.nearest_boundary_points) {
      if ((q - c.second).norm() <= 1e-12 * (1.0 + q.norm())) {
        dup = true;
        break;
      }
    }
    if (!dup) out.nearest_boundary_points.push_back(c.second);
  }
  return out;
}

std::vector<std::pair<double, Vec2>> circle_arc(const Vec2& center, double r, double from, double to,
                                                int count) {
  std::vector<std::pair<double, Vec2>> out;
  for (int k = 0; k < count; ++k) {
    const double t = from + (to - from) * k / std::max(1, count - 1);
    out.emplace_back(r, center + r * Vec2(std::cos(t), std::sin(t)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ellipse nearest points
// ---------------------------------------------------------------------------

constexpr int kEllipseScan = 64;

struct EllipseCritical {
  double t;
  double dist;
};

// Local minimisers of |q - (a cos t, b sin t)| in local coordinates q.
std::vector<EllipseCritical> ellipse_local_minima(const Ellipse& e, const Vec2& q) {
  const double a = e.semi_a;
  const double b = e.semi_b;
  const double ab2 = a * a - b * b;
  auto dist2 = [&](double t) {
    const double dx = q.x() - a * std::cos(t);
    const double dy = q.y() - b * std::sin(t);
    return dx * dx + dy * dy;
  };
  // Half the derivative of dist2 and its derivative.
  auto g = [&](double t) {
    const double s = std::sin(t), c = std::cos(t);
    return a * q.x() * s - b * q.y() * c - ab2 * s * c;
  };
  auto dg = [&](double t) {
    return a * q.x() * std::cos(t) + b * q.y() * std::sin(t) - ab2 * std::cos(2.0 * t);
  };

  std::array<double, kEllipseScan> f{};
  for (int k = 0; k < kEllipseScan; ++k) f[k] = dist2(2.0 * kPi * k / kEllipseScan);

  const double scale = a * (a + q.norm());
  std::vector<EllipseCritical> out;
  for (int k = 0; k < kEllipseScan; ++k) {
    const double fp = f[(k + kEllipseScan - 1) % kEllipseScan];
    const double fn = f[(k + 1) % kEllipseScan];
    if (!(f[k] <= fp && f[k] < fn)) continue;
    const double step = 2.0 * kPi / kEllipseScan;
    double lo = 2.0 * kPi * k / kEllipseScan - step;
    double hi = lo + 2.0 * step;
    double glo = g(lo), ghi = g(hi);
    double t = lo + step;
    if (glo > 0.0 || ghi < 0.0) {
      // Flat or degenerate bracket (circle-like data); keep the sample itself.
      out.push_back({t, std::sqrt(f[k])});
      continue;
    }
    // Damped Newton on g inside the bracket, bisection fallback.
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      const double gt = g(t);
      if (std::abs(gt) <= 1e-14 * scale) {
        converged = true;
        break;
      }
      if (gt < 0.0) lo = t; else hi = t;
      const double d = dg(t);
      double next = (d > 0.0) ? t - gt / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (hi - lo <= 1e-15 * (1.0 + std::abs(t))) {
        t = next;
        converged = true;
        break;
      }
      t = next;
    }
    if (!converged) {
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) lo = mid; else hi = mid;
      }
      t = 0.5 * (lo + hi);
    }
    out.push_back({t, std::sqrt(dist2(t))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polygon helpers
// ---------------------------------------------------------------------------

struct EdgeLine {
  Vec2 normal;  // inward unit normal
  double offset;  // normal . x = offset on the edge line
};

std::vector<EdgeLine> edge_lines(const ConvexPolygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  std::vector<EdgeLine> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = (v[(i + 1) % n] - v[i]).normalized();
    const Vec2 nrm = perp(d);  // left of a CCW edge points inside
    out.push_back({nrm, nrm.dot(v[i])});
  }
  return out;
}

// Point x and time t at which the offset lines n_k . x - t = c_k (k = 0..2) concur.
std::optional<std::pair<Vec2, double>> concurrency(const EdgeLine& l0, const EdgeLine& l1,
                                                   const EdgeLine& l2) {
  Eigen::Matrix3d m;
  m << l0.normal.x(), l0.normal.y(), -1.0, l1.normal.x(), l1.normal.y(), -1.0, l2.normal.x(),
      l2.normal.y(), -1.0;
  const Eigen::Vector3d rhs(l0.offset, l1.offset, l2.offset);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::Vector3d s = lu.solve(rhs);
  return std::make_pair(Vec2(s.x(), s.y()), s.z());
}

struct InscribedSet {
  double radius;
  Vec2 p;
  Vec2 q;
};

InscribedSet polygon_inscribed(const ConvexPolygon& poly) {
  const auto lines = edge_lines(poly);
  const std::size_t n = lines.size();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, Vec2>> cands;
  double scale = 0.0;
  for (const auto& v : poly.vertices) scale = std::max(scale, v.norm());
  const double feas_tol = 1e-12 * (1.0 + scale);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        auto c = concurrency(lines[i], lines[j], lines[k]);
        if (!c) continue;
        const auto& [x, t] = *c;
        bool feasible = t > 0.0;
        for (std::size_t l = 0; l < n && feasible; ++l) {
          if (lines[l].normal.dot(x) - lines[l].offset < t - feas_tol) feasible = false;
        }
        if (!feasible) continue;
        cands.emplace_back(t, x);
        best = std::max(best, t);
      }
    }
  }
  if (cands.empty()) throw InvalidInput("polygon: no inscribed circle found");
  std::vector<Vec2> opt;
  for (const auto& c : cands) {
    if (c.first >= best - 1e-10 * (1.0 + scale)) opt.push_back(c.second);
  }
  InscribedSet out{best, opt.front(), opt.front()};
  double far = 0.0;
  for (std::size_t i = 0; i < opt.size(); ++i) {
    for (std::size_t j = i + 1; j < opt.size(); ++j) {
      const double d = (opt[i] - opt[j]).norm();
      if (d > far) {
        far = d;
        out.p = opt[i];
        out.q = opt[j];
      }
    }
  }
  if (far <= 1e-10 * (1.0 + scale)) out.q = out.p;
  return out;
}

// Straight skeleton of a convex polygon by wavefront propagation: each event
// removes the edge whose neighbours' bisectors meet first.
Locus polygon_skeleton(const ConvexPolygon& poly) {
  const auto all = edge_lines(poly);
  std::vector<int> active(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) active[i] = static_cast<int>(i);
  // origin[i]: skeleton node where the wavefront vertex between active[i] and
  // active[i+1] was created.
  std::vector<Vec2> origin;
  for (std::size_t i = 0; i < all.size(); ++i) origin.push_back(poly.vertices[(i + 1) % all.size()]);

  Locus out;
  auto emit = [&](const Vec2& a, const Vec2& b) {
    if ((a - b).norm() > 1e-12 * (1.0 + a.norm())) out.segments.push_back({a, b});
  };

  while (active.size() > 3) {
    const std::size_t m = active.size();
    double best_t = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    Vec2 best_x = Vec2::Zero();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& prev = all[active[(i + m - 1) % m]];
      const auto& cur = all[active[i]];
      const auto& next = all[active[(i + 1) % m]];
      auto c = concurrency(prev, cur, next);
      if (!c) continue;
      if (c->second < best_t) {
        best_t = c->second;
        best_i = i;
        best_x = c->first;
      }
    }
    const std::size_t ip = (best_i + m - 1) % m;
    emit(origin[ip], best_x);
    emit(origin[best_i], best_x);
    origin[ip] = best_x;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_i));
    origin.erase(origin.begin() + static_cast<std::ptrdiff_t>(best_i));
  }
  auto c = concurrency(all[active[0]], all[active[1]], all[active[2]]);
  if (c) {
    for (const auto& o : origin) emit(o, c->first);
  }
  if (out.segments.empty() && c) out.segments.push_back({c->first, c->first});
  return out;
}

// ---------------------------------------------------------------------------
// Ellipse arclength table
// ---------------------------------------------------------------------------

std::vector<double> ellipse_arclength_table(const Ellipse& e, int steps) {
  std::vector<double> s(steps + 1, 0.0);
  auto speed = [&](double t) {
    return std::hypot(e.semi_a * std::sin(t), e.semi_b * std::cos(t));
  };
  const double dt = 2.0 * kPi / steps;
  for (int k = 0; k < steps; ++k) {
    const double t0 = k * dt;
    s[k + 1] = s[k] + dt / 6.0 * (speed(t0) + 4.0 * speed(t0 + 0.5 * dt) + speed(t0 + dt));
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Segment / Locus
// ---------------------------------------------------------------------------

double Segment::distance_to(const Vec2& p) const { return (p - closest_on_segment(a, b, p)).norm(); }

std::vector<Vec2> Locus::sample(double spacing) const {
  std::vector<Vec2> out;
  for (const auto& s : segments) {
    const int n = std::max(1, static_cast<int>(std::ceil(s.length() / spacing)));
    if (s.length() == 0.0) {
      out.push_back(s.a);
      continue;
    }
    for (int k = 0; k <= n; ++k) out.push_back(s.a + (s.b - s.a) * (static_cast<double>(k) / n));
  }
  return out;
}

double Locus::distance_to(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : segments) best = std::min(best, s.distance_to(p));
  return best;
}

double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<Vec2>& x, const std::vector<Vec2>& y) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y) best = std::min(best, (p - q).squaredNorm());
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

// ---------------------------------------------------------------------------
// Domain construction
// ---------------------------------------------------------------------------

Domain Domain::ball(const Vec2& center, double radius) {
  require_finite(center, "ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("ball radius must be positive");
  return Domain(Ball{center, radius});
}

Domain Domain::stadium(const Vec2& a, const Vec2& b, double radius) {
  require_finite(a, "stadium endpoint");
  require_finite(b, "stadium endpoint");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("stadium radius must be positive");
  if ((b - a).norm() == 0.0) return ball(a, radius);
  return Domain(Stadium{a, b, radius});
}

Domain Domain::ellipse(const Vec2& center, double semi_a, double semi_b) {
  require_finite(center, "ellipse center");
  if (!(semi_a > 0.0) || !(semi_b > 0.0) || !std::isfinite(semi_a) || !std::isfinite(semi_b)) {
    throw InvalidInput("ellipse semi-axes must be positive");
  }
  if (semi_a < semi_b) throw InvalidInput("ellipse requires semi_axis_a >= semi_axis_b (major axis along x)");
  return Domain(Ellipse{center, semi_a, semi_b});
}

Domain Domain::polygon(std::vector<Vec2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw InvalidInput("polygon needs at least three vertices");
  double scale = 0.0;
  for (const auto& v : vertices) {
    require_finite(v, "polygon vertex");
    scale = std::max(scale, v.norm());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = vertices[i];
    const Vec2& q = vertices[(i + 1) % n];
    const Vec2& r = vertices[(i + 2) % n];
    const double turn = cross(q - p, r - q);
    if (!(turn > 1e-12 * (1.0 + scale * scale))) {
      throw InvalidInput("polygon must be strictly convex and counterclockwise");
    }
  }
  // Winding number one: total turning of a simple convex polygon is 2*pi.
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d0 = vertices[(i + 1) % n] - vertices[i];
    const Vec2 d1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    total += std::atan2(cross(d0, d1), d0.dot(d1));
  }
  if (std::abs(total - 2.0 * kPi) > 1e-6) throw InvalidInput("polygon is self-intersecting");
  return Domain(ConvexPolygon{std::move(vertices)});
}

Domain Domain::rectangle(const Vec2& lo, const Vec2& hi) {
  return polygon({lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())});
}

std::string Domain::kind() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return "ball";
        else if constexpr (std::is_same_v<T, Stadium>) return "stadium";
        else if constexpr (std::is_same_v<T, Ellipse>) return "ellipse";
        else return "polygon";
      },
      shape_);
}

// ---------------------------------------------------------------------------
// Distance
// ---------------------------------------------------------------------------

double Domain::signed_distance(const Vec2& p) const {
  require_finite(p, "signed_distance");
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return s.radius - (p - s.center).norm();
        } else if constexpr (std::is_same_v<T, Stadium>) {
          return s.radius - (p - closest_on_segment(s.a, s.b, p)).norm();
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const Vec2 q = p - s.center;
          const auto mins = ellipse_local_minima(s, q);
          double d = std::numeric_limits<double>::infinity();
          for (const auto& m : mins) d = std::min(d, m.dist);
          const double level = (q.x() / s.semi_a) * (q.x() / s.semi_a) + (q.y() / s.semi_b) * (q.y() / s.semi_b);
          return level < 1.0 ? d : -d;
        } else {
          const auto lines = edge_lines(s);
          double inner = std::numeric_limits<double>::infinity();
          for (const auto& l : lines) inner = std::min(inner, l.normal.dot(p) - l.offset);
          if (inner >= 0.0) return inner;
          double outer = std::numeric_limits<double>::infinity();
          const auto& v = s.vertices;
          for (std::size_t i = 0; i < v.size(); ++i) {
            outer = std::min(outer, (p - closest_on_segment(v[i], v[(i + 1) % v.size()], p)).norm());
          }
          return -outer;
        }
      },
      shape_);
}

DistanceProbe Domain::probe(const Vec2& p, double slack) const {
  const double sd = signed_distance(p);
  const double dist = std::abs(sd);
  return std::visit(
      [&](const auto& s) -> DistanceProbe {
        using T = std::decay_t<decltype(s)>;
        std::vector<std::pair<double, Vec2>> cands;
        if constexpr (std::is_same_v<T, Ball>) {
          const Vec2 q = p - s.center;
          if (q.norm() <= 1e-14 * s.radius) {
            cands = circle_arc(s.center, s.radius, 0.0, 2.0 * kPi * 15.0 / 16.0, 16);
          } else {
            cands.emplace_back(dist, s.center + s.radius * q.normalized());
          }
        } else if constexpr (std::is_same_v<T, Stadium>) {
          const Vec2 e = (s.b - s.a).normalized();
          const Vec2 n = perp(e);
          const double len = (s.b - s.a).norm();
          const double along = (p - s.a).dot(e);
          if (along >= 0.0 && along <= len) {
            for (double side : {1.0, -1.0}) {
              const Vec2 foot = s.a + along * e + side * s.radius * n;
              cands.emplace_back((p - foot).norm(), foot);
            }
          }
          for (int end = 0; end < 2; ++end) {
            const Vec2 c = end == 0 ? s.a : s.b;
            const Vec2 away = end == 0 ? Vec2(-e) : e;
            const Vec2 q = p - c;
            if (q.norm() <= 1e-14 * s.radius) {
              const double base = std::atan2(away.y(), away.x());
              auto arc = circle_arc(c, s.radius, base - 0.5 * kPi, base + 0.5 * kPi, 9);
              cands.insert(cands.end(), arc.begin(), arc.end());
            } else if (q.dot(away) >= 0.0) {
              const Vec2 y = c + s.radius * q.normalized();
              cands.emplace_back((p - y).norm(), y);
            }
          }
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const Vec2 q = p - s.center;
          for (const auto& m : ellipse_local_minima(s, q)) {
            cands.emplace_back(m.dist, s.center + Vec2(s.semi_a * std::cos(m.t), s.semi_b * std::sin(m.t)));
          }
        } else {
          const auto& v = s.vertices;
          const std::size_t nv = v.size();
          for (std::size_t i = 0; i < nv; ++i) {
            const Vec2 y = closest_on_segment(v[i], v[(i + 1) % nv], p);
            // Only feet strictly inside an edge, or vertices that are local
            // minima of the boundary distance, are kept.
            const Vec2 d = v[(i + 1) % nv] - v[i];
            const double t = (p - v[i]).dot(d) / d.squaredNorm();
            if (t > 0.0 && t < 1.0) {
              cands.emplace_back((p - y).norm(), y);
            }
          }
          for (std::size_t i = 0; i < nv; ++i) {
            const Vec2& c = v[i];
            const Vec2 din = (v[(i + 1) % nv] - c);
            const Vec2 dout = (v[(i + nv - 1) % nv] - c);
            if ((p - c).dot(din) <= 0.0 && (p - c).dot(dout) <= 0.0) {
              cands.emplace_back((p - c).norm(), c);
            }
          }
        }
        return finish_probe(p, dist, std::move(cands), slack);
      },
      shape_);
}

double Domain::inradius() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return s.radius;
        else if constexpr (std::is_same_v<T, Stadium>) return s.radius;
        else if constexpr (std::is_same_v<T, Ellipse>) return s.semi_b;
        else return polygon_inscribed(s).radius;
      },
      shape_);
}

BoundingBox Domain::bounding_box() const {
  return std::visit(
      [](const auto& s) -> BoundingBox {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          const Vec2 r(s.radius, s.radius);
          return {s.center - r, s.center + r};
        } else if constexpr (std::is_same_v<T, Stadium>) {
          const Vec2 r(s.radius, s.radius);
          return {s.a.cwiseMin(s.b) - r, s.a.cwiseMax(s.b) + r};
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const Vec2 r(s.semi_a, s.semi_b);
          return {s.center - r, s.center + r};
        } else {
          BoundingBox b{s.vertices.front(), s.vertices.front()};
          for (const auto& v : s.vertices) {
            b.lo = b.lo.cwiseMin(v);
            b.hi = b.hi.cwiseMax(v);
          }
          return b;
        }
      },
      shape_);
}

double Domain::area() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return kPi * s.radius * s.radius;
        else if constexpr (std::is_same_v<T, Stadium>) {
          return kPi * s.radius * s.radius + 2.0 * s.radius * (s.b - s.a).norm();
        } else if constexpr (std::is_same_v<T, Ellipse>) return kPi * s.semi_a * s.semi_b;
        else {
          double twice = 0.0;
          const auto& v = s.vertices;
          for (std::size_t i = 0; i < v.size(); ++i) twice += cross(v[i], v[(i + 1) % v.size()]);
          return 0.5 * twice;
        }
      },
      shape_);
}

double Domain::perimeter() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return 2.0 * kPi * s.radius;
        else if constexpr (std::is_same_v<T, Stadium>) {
          return 2.0 * kPi * s.radius + 2.0 * (s.b - s.a).norm();
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return ellipse_arclength_table(s, 4096).back();
        } else {
          double total = 0.0;
          const auto& v = s.vertices;
          for (std::size_t i = 0; i < v.size(); ++i) total += (v[(i + 1) % v.size()] - v[i]).norm();
          return total;
        }
      },
      shape_);
}

std::vector<BoundarySample> Domain::boundary_samples(int count) const {
  if (count < 1) throw InvalidInput("boundary_samples: count must be positive");
  std::vector<BoundarySample> out;
  out.reserve(count);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          for (int k = 0; k < count; ++k) {
            const double t = 2.0 * kPi * k / count;
            const Vec2 dir(std::cos(t), std::sin(t));
            out.push_back({s.center + s.radius * dir, -dir});
          }
        } else if constexpr (std::is_same_v<T, Stadium>) {
          const Vec2 e = (s.b - s.a).normalized();
          const Vec2 n = perp(e);
          const double len = (s.b - s.a).norm();
          const double arc = kPi * s.radius;
          const double total = 2.0 * len + 2.0 * arc;
          for (int k = 0; k < count; ++k) {
            double u = total * k / count;
            if (u < len) {  // bottom flat side, from a to b
              out.push_back({s.a + u * e - s.radius * n, n});
              continue;
            }
            u -= len;
            if (u < arc) {  // cap around b
              const double ang = -0.5 * kPi + u / s.radius;
              const Vec2 dir = std::cos(ang) * e + std::sin(ang) * n;
              out.push_back({s.b + s.radius * dir, -dir});
              continue;
            }
            u -= arc;
            if (u < len) {  // top flat side, from b to a
              out.push_back({s.b - u * e + s.radius * n, -n});
              continue;
            }
            u -= len;
            const double ang = 0.5 * kPi + u / s.radius;
            const Vec2 dir = std::cos(ang) * e + std::sin(ang) * n;
            out.push_back({s.a + s.radius * dir, -dir});
          }
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const int steps = 8192;
          const auto table = ellipse_arclength_table(s, steps);
          const double total = table.back();
          std::size_t j = 0;
          for (int k = 0; k < count; ++k) {
            const double target = total * k / count;
            while (j + 1 < table.size() && table[j + 1] < target) ++j;
            const double frac = (table[j + 1] > table[j]) ? (target - table[j]) / (table[j + 1] - table[j]) : 0.0;
            const double t = 2.0 * kPi * (j + frac) / steps;
            const Vec2 y = s.center + Vec2(s.semi_a * std::cos(t), s.semi_b * std::sin(t));
            const Vec2 outward = Vec2(std::cos(t) / s.semi_a, std::sin(t) / s.semi_b).normalized();
            out.push_back({y, -outward});
          }
        } else {
          const auto& v = s.vertices;
          const std::size_t nv = v.size();
          const auto lines = edge_lines(s);
          std::vector<double> cum(nv + 1, 0.0);
          for (std::size_t i = 0; i < nv; ++i) cum[i + 1] = cum[i] + (v[(i + 1) % nv] - v[i]).norm();
          std::size_t i = 0;
          for (int k = 0; k < count; ++k) {
            const double target = cum[nv] * k / count;
            while (i + 1 < nv && cum[i + 1] <= target) ++i;
            const double t = (target - cum[i]) / (cum[i + 1] - cum[i]);
            const Vec2 y = v[i] + t * (v[(i + 1) % nv] - v[i]);
            Vec2 nrm = lines[i].normal;
            if (t == 0.0) nrm = (lines[i].normal + lines[(i + nv - 1) % nv].normal).normalized();
            out.push_back({y, nrm});
          }
        }
      },
      shape_);
  return out;
}

Locus Domain::high_ridge() const {
  return std::visit(
      [](const auto& s) -> Locus {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return Locus{{{s.center, s.center}}};
        else if constexpr (std::is_same_v<T, Stadium>) return Locus{{{s.a, s.b}}};
        else if constexpr (std::is_same_v<T, Ellipse>) {
          if (s.semi_a == s.semi_b) return Locus{{{s.center, s.center}}};
          // d attains b only at the centre when a > b.
          return Locus{{{s.center, s.center}}};
        } else {
          const auto ins = polygon_inscribed(s);
          return Locus{{{ins.p, ins.q}}};
        }
      },
      shape_);
}

Locus Domain::cut_locus() const {
  return std::visit(
      [](const auto& s) -> Locus {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return Locus{{{s.center, s.center}}};
        else if constexpr (std::is_same_v<T, Stadium>) return Locus{{{s.a, s.b}}};
        else if constexpr (std::is_same_v<T, Ellipse>) {
          // Segment between the centres of curvature at the major-axis vertices.
          const double c = (s.semi_a * s.semi_a - s.semi_b * s.semi_b) / s.semi_a;
          return Locus{{{s.center - Vec2(c, 0.0), s.center + Vec2(c, 0.0)}}};
        } else {
          return polygon_skeleton(s);
        }
      },
      shape_);
}

// ---------------------------------------------------------------------------
// Free functions
// ---------------------------------------------------------------------------

double signed_distance(const Domain& domain, const Vec2& point) { return domain.signed_distance(point); }
double inradius(const Domain& domain) { return domain.inradius(); }
Locus high_ridge(const Domain& domain) { return domain.high_ridge(); }
Locus cut_locus(const Domain& domain) { return domain.cut_locus(); }

namespace {
double locus_spacing(const Domain& domain) {
  const auto bb = domain.bounding_box();
  return 1e-3 * (bb.hi - bb.lo).norm();
}
}  // namespace

CutHighComparison cut_equals_high_ridge(const Domain& domain, double hausdorff_tol) {
  if (!(hausdorff_tol > 0.0)) throw InvalidInput("cut_equals_high_ridge: tolerance must be positive");
  const double spacing = locus_spacing(domain);
  const auto cut = domain.cut_locus().sample(spacing);
  const auto high = domain.high_ridge().sample(spacing);
  CutHighComparison out;
  out.hausdorff = hausdorff_distance(cut, high);
  out.equal = out.hausdorff <= hausdorff_tol;
  return out;
}

double web_function(const Domain& domain, const Vec2& point) {
  const double rho = domain.inradius();
  const double d = domain.signed_distance(point);
  if (d < -1e-12 * (1.0 + rho)) throw DomainError("web_function: point outside the closed domain");
  const double dd = std::clamp(d, 0.0, rho);
  return kWebConstant * (std::pow(rho, 4.0 / 3.0) - std::pow(rho - dd, 4.0 / 3.0));
}

DiametralBall diametral_ball_check(const Domain& domain, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("diametral_ball_check: tolerance must be positive");
  const double rho = domain.inradius();
  const auto centers = domain.high_ridge().sample(locus_spacing(domain) * 5.0);
  DiametralBall out;
  for (const auto& c : centers) {
    const auto pr = domain.probe(c, 1e-9 * (1.0 + rho));
    const auto& ys = pr.nearest_boundary_points;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      for (std::size_t j = i + 1; j < ys.size(); ++j) {
        if ((0.5 * (ys[i] + ys[j]) - c).norm() <= tol) {
          out.found = true;
          out.center = c;
          out.y_plus = ys[i].y() >= ys[j].y() ? ys[i] : ys[j];
          out.y_minus = ys[i].y() >= ys[j].y() ? ys[j] : ys[i];
          return out;
        }
      }
    }
  }
  return out;
}

}  // namespace inflap
