#include "inflap/lower_hull.hpp"

#include "inflap/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace inflap {

namespace {

using Vec3 = Eigen::Vector3d;

struct Face {
  std::array<int, 3> v;
  Vec3 normal;
  double offset;
  std::vector<int> outside;
  bool alive = true;
};

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

class QuickHull {
 public:
  QuickHull(std::vector<Vec3> pts, double eps) : p_(std::move(pts)), eps_(eps) {}

  // Returns false when the cloud is (numerically) coplanar.
  bool run() {
    if (!initial_simplex()) return false;
    std::vector<int> stack;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      if (!faces_[f].outside.empty()) stack.push_back(f);
    }
    while (!stack.empty()) {
      const int f = stack.back();
      stack.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(f, stack);
    }
    return true;
  }

  const std::vector<Face>& faces() const { return faces_; }

 private:
  double dist(const Face& f, int i) const { return f.normal.dot(p_[i]) - f.offset; }

  int make_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    Vec3 n = (p_[b] - p_[a]).cross(p_[c] - p_[a]);
    const double len = n.norm();
    f.normal = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    f.offset = f.normal.dot(p_[a]);
    faces_.push_back(std::move(f));
    const int id = static_cast<int>(faces_.size()) - 1;
    edges_[edge_key(a, b)] = id;
    edges_[edge_key(b, c)] = id;
    edges_[edge_key(c, a)] = id;
    return id;
  }

  bool initial_simplex() {
    const int n = static_cast<int>(p_.size());
    if (n < 4) return false;
    std::array<int, 6> ext{};
    for (int axis = 0; axis < 3; ++axis) {
      int lo = 0, hi = 0;
      for (int i = 0; i < n; ++i) {
        if (p_[i][axis] < p_[lo][axis]) lo = i;
        if (p_[i][axis] > p_[hi][axis]) hi = i;
      }
      ext[2 * axis] = lo;
      ext[2 * axis + 1] = hi;
    }
    int a = ext[0], b = ext[1];
    double best = -1.0;
    for (int i : ext) {
      for (int j : ext) {
        const double d = (p_[i] - p_[j]).squaredNorm();
        if (d > best) {
          best = d;
          a = i;
          b = j;
        }
      }
    }
    if (best <= eps_ * eps_) return false;
    const Vec3 ab = (p_[b] - p_[a]).normalized();
    int c = -1;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec3 w = p_[i] - p_[a];
      const double d = (w - w.dot(ab) * ab).norm();
      if (d > best) {
        best = d;
        c = i;
      }
    }
    if (c < 0 || best <= eps_) return false;
    const Vec3 nrm = (p_[b] - p_[a]).cross(p_[c] - p_[a]).normalized();
    int d = -1;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = std::abs(nrm.dot(p_[i] - p_[a]));
      if (s > best) {
        best = s;
        d = i;
      }
    }
    if (d < 0 || best <= eps_) return false;

    if (nrm.dot(p_[d] - p_[a]) > 0.0) std::swap(b, c);  // d must lie behind (a,b,c)
    make_face(a, b, c);
    make_face(a, d, b);
    make_face(b, d, c);
    make_face(c, d, a);

    for (int i = 0; i < n; ++i) {
      if (i == a || i == b || i == c || i == d) continue;
      assign(i, 0, 4);
    }
    return true;
  }

  void assign(int i, int first_face, int end_face) {
    int best_face = -1;
    double best = eps_;
    for (int f = first_face; f < end_face; ++f) {
      if (!faces_[f].alive) continue;
      const double s = dist(faces_[f], i);
      if (s > best) {
        best = s;
        best_face = f;
      }
    }
    if (best_face >= 0) faces_[best_face].outside.push_back(i);
  }

  void add_point(int start, std::vector<int>& stack) {
    const auto& out = faces_[start].outside;
    int apex = out.front();
    double far = dist(faces_[start], apex);
    for (int i : out) {
      const double s = dist(faces_[start], i);
      if (s > far) {
        far = s;
        apex = i;
      }
    }

    std::vector<int> visible{start};
    std::vector<char> is_visible(faces_.size(), 0);
    is_visible[start] = 1;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const Face& f = faces_[visible[q]];
      for (int e = 0; e < 3; ++e) {
        const auto it = edges_.find(edge_key(f.v[(e + 1) % 3], f.v[e]));
        if (it == edges_.end()) continue;
        const int g = it->second;
        if (is_visible[g] || !faces_[g].alive) continue;
        if (dist(faces_[g], apex) > eps_) {
          is_visible[g] = 1;
          visible.push_back(g);
        }
      }
    }

    std::vector<std::pair<int, int>> horizon;
    for (int fi : visible) {
      const Face& f = faces_[fi];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[e], b = f.v[(e + 1) % 3];
        const auto it = edges_.find(edge_key(b, a));
        if (it == edges_.end() || !is_visible[it->second]) horizon.emplace_back(a, b);
      }
    }

    std::vector<int> orphans;
    for (int fi : visible) {
      Face& f = faces_[fi];
      for (int i : f.outside) {
        if (i != apex) orphans.push_back(i);
      }
      f.outside.clear();
      f.outside.shrink_to_fit();
      f.alive = false;
      for (int e = 0; e < 3; ++e) {
        const auto it = edges_.find(edge_key(f.v[e], f.v[(e + 1) % 3]));
        if (it != edges_.end() && it->second == fi) edges_.erase(it);
      }
    }

    const int first = static_cast<int>(faces_.size());
    for (const auto& [a, b] : horizon) make_face(a, b, apex);
    const int end = static_cast<int>(faces_.size());
    for (int i : orphans) assign(i, first, end);
    for (int f = first; f < end; ++f) {
      if (!faces_[f].outside.empty()) stack.push_back(f);
    }
  }

  std::vector<Vec3> p_;
  double eps_;
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, int> edges_;
};

}  // namespace

std::vector<double> lower_convex_envelope(std::span<const Vec2> xy, std::span<const double> z) {
  const std::size_t n = xy.size();
  if (z.size() != n) throw InvalidInput("lower_convex_envelope: size mismatch");
  std::vector<double> out(z.begin(), z.end());
  if (n < 4) return out;

  // Independent affine normalisation of xy and z preserves the hull structure.
  Vec2 lo = xy[0], hi = xy[0];
  double zlo = z[0], zhi = z[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(z[i])) throw InvalidInput("lower_convex_envelope: non-finite value");
    lo = lo.cwiseMin(xy[i]);
    hi = hi.cwiseMax(xy[i]);
    zlo = std::min(zlo, z[i]);
    zhi = std::max(zhi, z[i]);
  }
  const Vec2 mid = 0.5 * (lo + hi);
  const double sxy = std::max(0.5 * (hi - lo).maxCoeff(), std::numeric_limits<double>::min());
  const double zmid = 0.5 * (zlo + zhi);
  const double sz = 0.5 * (zhi - zlo);
  if (sz <= 0.0) return out;  // constant data is convex

  std::vector<Vec3> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 q = (xy[i] - mid) / sxy;
    pts[i] = Vec3(q.x(), q.y(), (z[i] - zmid) / sz);
  }

  constexpr double kEps = 1e-13;
  QuickHull hull(pts, kEps);
  if (!hull.run()) return out;  // coplanar lifted points: affine data

  // Bucket sites so every lower facet only visits nearby sites.
  const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n)) / 2));
  auto bucket_of = [&](double c) {
    return std::clamp(static_cast<int>((c + 1.0) * 0.5 * nb), 0, nb - 1);
  };
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nb) * nb);
  for (std::size_t i = 0; i < n; ++i) {
    buckets[bucket_of(pts[i].y()) * nb + bucket_of(pts[i].x())].push_back(static_cast<int>(i));
  }

  std::vector<double> env(n, -std::numeric_limits<double>::infinity());
  const double bary_tol = 1e-9;
  for (const auto& f : hull.faces()) {
    if (!f.alive || !(f.normal.z() < -1e-14)) continue;
    const Vec3& a = pts[f.v[0]];
    const Vec3& b = pts[f.v[1]];
    const Vec3& c = pts[f.v[2]];
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    if (std::abs(det) < 1e-300) continue;
    const double xmin = std::min({a.x(), b.x(), c.x()}), xmax = std::max({a.x(), b.x(), c.x()});
    const double ymin = std::min({a.y(), b.y(), c.y()}), ymax = std::max({a.y(), b.y(), c.y()});
    for (int by = bucket_of(ymin - 1e-9); by <= bucket_of(ymax + 1e-9); ++by) {
      for (int bx = bucket_of(xmin - 1e-9); bx <= bucket_of(xmax + 1e-9); ++bx) {
        for (int i : buckets[by * nb + bx]) {
          const Vec3& p = pts[i];
          const double l1 = ((p.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (p.y() - a.y())) / det;
          const double l2 = ((b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y())) / det;
          if (l1 < -bary_tol || l2 < -bary_tol || l1 + l2 > 1.0 + bary_tol) continue;
          const double zp = (f.offset - f.normal.x() * p.x() - f.normal.y() * p.y()) / f.normal.z();
          env[i] = std::max(env[i], zp);
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(env[i])) {
      // Not covered by any projected facet (numerical gap): fall back to the
      // supremum over all lower supporting planes.
      for (const auto& f : hull.faces()) {
        if (!f.alive || !(f.normal.z() < -1e-14)) continue;
        const double zp = (f.offset - f.normal.x() * pts[i].x() - f.normal.y() * pts[i].y()) / f.normal.z();
        env[i] = std::max(env[i], zp);
      }
    }
    out[i] = std::min(z[i], zmid + sz * env[i]);
  }
  return out;
}

}  // namespace inflap
