#include "inflap/grid.hpp"

#include "inflap/detail/parabola_envelope.hpp"
#include "inflap/errors.hpp"
#include "inflap/lower_hull.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace inflap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMargin = 5;

struct Cell {
  int i0 = 0;
  int j0 = 0;
  double fx = 0.0;
  double fy = 0.0;
  bool valid = false;
};

// Fractional offsets within 1e-9 of a node are snapped so that node-coincident
// queries return node values exactly.
double snap(double f) {
  const double r = std::round(f);
  return std::abs(f - r) < 1e-9 ? r : f;
}

Cell locate(const Grid& g, const Vec2& p) {
  Cell c;
  const double gx = snap((p.x() - g.origin().x()) / g.h());
  const double gy = snap((p.y() - g.origin().y()) / g.h());
  if (!std::isfinite(gx) || !std::isfinite(gy)) return c;
  c.i0 = static_cast<int>(std::floor(gx));
  c.j0 = static_cast<int>(std::floor(gy));
  // A query exactly on the last grid line uses the cell to its left/below.
  if (c.i0 == g.nx() - 1) --c.i0;
  if (c.j0 == g.ny() - 1) --c.j0;
  c.fx = gx - c.i0;
  c.fy = gy - c.j0;
  c.valid = c.i0 >= 0 && c.j0 >= 0 && c.i0 + 1 < g.nx() && c.j0 + 1 < g.ny();
  return c;
}

template <typename T>
bool bilinear(const Grid& g, const std::vector<T>& ext, const Vec2& p, T& out, bool (*finite)(const T&)) {
  const Cell c = locate(g, p);
  if (!c.valid) return false;
  const int k00 = g.index(c.i0, c.j0);
  const std::array<int, 4> idx{k00, k00 + 1, k00 + g.nx(), k00 + g.nx() + 1};
  const std::array<double, 4> w{(1.0 - c.fx) * (1.0 - c.fy), c.fx * (1.0 - c.fy), (1.0 - c.fx) * c.fy,
                                c.fx * c.fy};
  bool first = true;
  for (int q = 0; q < 4; ++q) {
    if (w[q] == 0.0) continue;
    if (!finite(ext[idx[q]])) return false;
    if (first) {
      out = w[q] * ext[idx[q]];
      first = false;
    } else {
      out += w[q] * ext[idx[q]];
    }
  }
  return !first;
}

bool finite_scalar(const double& v) { return std::isfinite(v); }
bool finite_vec(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

// Bilinear weights of the cell containing p, only when every corner is inside.
bool inside_cell_weights(const Grid& g, const Vec2& p, double scale, std::vector<std::pair<int, double>>& out) {
  const Cell c = locate(g, p);
  if (!c.valid) return false;
  const int k00 = g.index(c.i0, c.j0);
  const std::array<int, 4> idx{k00, k00 + 1, k00 + g.nx(), k00 + g.nx() + 1};
  const std::array<double, 4> w{(1.0 - c.fx) * (1.0 - c.fy), c.fx * (1.0 - c.fy), (1.0 - c.fx) * c.fy,
                                c.fx * c.fy};
  for (int q = 0; q < 4; ++q) {
    if (w[q] != 0.0 && !g.inside(idx[q])) return false;
  }
  for (int q = 0; q < 4; ++q) {
    if (w[q] != 0.0) out.emplace_back(idx[q], scale * w[q]);
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

Grid::Grid(Domain domain, int resolution) : domain_(std::move(domain)) {
  if (resolution < 16) throw ConfigurationError("build_grid: resolution must be at least 16");
  const auto bb = domain_.bounding_box();
  const Vec2 ext = bb.hi - bb.lo;
  h_ = ext.maxCoeff() / resolution;
  rho_ = domain_.inradius();
  if (rho_ < 4.0 * h_) {
    throw ConfigurationError("build_grid: inradius " + std::to_string(rho_) + " is below 4h = " +
                             std::to_string(4.0 * h_));
  }
  const int cx = static_cast<int>(std::ceil(ext.x() / h_ - 1e-9));
  const int cy = static_cast<int>(std::ceil(ext.y() / h_ - 1e-9));
  nx_ = cx + 1 + 2 * kMargin;
  ny_ = cy + 1 + 2 * kMargin;
  // Centre the node lattice on the bounding box.
  const Vec2 slack(0.5 * (cx * h_ - ext.x()), 0.5 * (cy * h_ - ext.y()));
  origin_ = bb.lo - slack - Vec2::Constant(kMargin * h_);

  sdist_.resize(size());
  inside_.resize(size());
  for (int k = 0; k < size(); ++k) {
    sdist_[k] = domain_.signed_distance(node(k));
    inside_[k] = sdist_[k] > 0.0 ? 1 : 0;
    inside_count_ += inside_[k];
  }
  build_band();
  build_ghosts();
}

void Grid::build_band() {
  theta_.assign(size(), {1.0, 1.0, 1.0, 1.0});
  const std::array<Vec2, 4> dirs{Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)};
  const std::array<int, 4> di{1, -1, 0, 0};
  const std::array<int, 4> dj{0, 0, 1, -1};
  for (int k = 0; k < size(); ++k) {
    if (!inside(k)) continue;
    const int i = column(k), j = row(k);
    for (int a = 0; a < 4; ++a) {
      const int nb = index(i + di[a], j + dj[a]);
      if (inside(nb)) continue;
      const Vec2 x = node(k);
      auto f = [&](double s) { return domain_.signed_distance(x + s * dirs[a]); };
      const double f1 = sdist_[nb];
      double s = h_;
      if (f1 < 0.0) {
        boost::uintmax_t iters = 200;
        const double tol = 1e-10 * h_;
        auto stop = [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; };
        const auto r = boost::math::tools::toms748_solve(f, 0.0, h_, sdist_[k], f1, stop, iters);
        s = 0.5 * (r.first + r.second);
      }
      theta_[k][a] = std::clamp(s / h_, 1e-12, 1.0);
    }
  }
}

void Grid::build_ghosts() {
  const double band = ghost_band();
  for (int k = 0; k < size(); ++k) {
    if (inside(k) || sdist_[k] < -band) continue;
    const Vec2 g = node(k);
    const double sigma = -sdist_[k];
    const auto pr = domain_.probe(g);
    const Vec2 y = pr.nearest_boundary_points.front();
    Vec2 nu;
    if (sigma > 1e-9 * h_) {
      nu = (y - g) / (y - g).norm();
    } else {
      const double d = 1e-6 * h_;
      nu = Vec2(domain_.signed_distance(g + Vec2(d, 0)) - domain_.signed_distance(g - Vec2(d, 0)),
                domain_.signed_distance(g + Vec2(0, d)) - domain_.signed_distance(g - Vec2(0, d)))
               .normalized();
    }
    GhostStencil st;
    st.node = k;
    st.sigma = sigma;
    // First probe distance along the normal whose cell is fully inside.
    for (int step = 4; step <= 12; ++step) {
      const double s1 = 0.5 * step * h_;
      std::vector<std::pair<int, double>> w1;
      if (!inside_cell_weights(*this, y + s1 * nu, 1.0, w1)) continue;
      // Linear continuation through u(y) = 0.
      for (const auto& [idx, w] : w1) st.dirichlet.emplace_back(idx, -sigma / s1 * w);
      const double s2 = s1 + h_;
      std::vector<std::pair<int, double>> w2;
      if (inside_cell_weights(*this, y + s2 * nu, 1.0, w2)) {
        const double l1 = (s2 + sigma) / (s2 - s1);
        const double l2 = -(s1 + sigma) / (s2 - s1);
        for (const auto& [idx, w] : w1) st.extrapolate.emplace_back(idx, l1 * w);
        for (const auto& [idx, w] : w2) st.extrapolate.emplace_back(idx, l2 * w);
      }
      break;
    }
    if (st.dirichlet.empty()) {
      // Sharp corner: no inside cell along the normal. Fall back to the
      // nearest inside node.
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      const int ci = column(k), cj = row(k);
      for (int j = std::max(0, cj - 6); j <= std::min(ny_ - 1, cj + 6); ++j) {
        for (int i = std::max(0, ci - 6); i <= std::min(nx_ - 1, ci + 6); ++i) {
          const int m = index(i, j);
          const double dd = (node(m) - g).norm();
          if (inside(m) && dd < best_d) {
            best_d = dd;
            best = m;
          }
        }
      }
      if (best >= 0) {
        const double s1 = std::max(sdist_[best], 1e-12 * h_);
        st.dirichlet.emplace_back(best, -sigma / s1);
        st.extrapolate.emplace_back(best, 1.0);
      }
    }
    if (!st.dirichlet.empty()) ghosts_.push_back(std::move(st));
  }
}

GridPtr build_grid(const Domain& domain, int resolution) {
  return std::make_shared<const Grid>(domain, resolution);
}

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

ScalarField::ScalarField(GridPtr g, Extension ext)
    : grid(std::move(g)), values(grid->size(), kNaN), extension(ext) {
  for (int k = 0; k < grid->size(); ++k) {
    if (grid->inside(k)) values[k] = 0.0;
  }
}

double ScalarField::max_inside() const {
  double m = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid->size(); ++k) {
    if (grid->inside(k)) m = std::max(m, values[k]);
  }
  return m;
}

bool ScalarField::mask_consistent() const {
  for (int k = 0; k < grid->size(); ++k) {
    if (grid->inside(k) != std::isfinite(values[k])) return false;
  }
  return true;
}

VectorField::VectorField(GridPtr g) : grid(std::move(g)), values(grid->size(), Vec2(kNaN, kNaN)) {
  for (int k = 0; k < grid->size(); ++k) {
    if (grid->inside(k)) values[k] = Vec2::Zero();
  }
}

VectorField gradient(const ScalarField& field) {
  const Grid& g = *field.grid;
  VectorField out(field.grid);
  const double h = g.h();
  const bool dirichlet = field.extension == Extension::DirichletZero;
  const auto& u = field.values;
  for (int k = 0; k < g.size(); ++k) {
    if (!g.inside(k)) continue;
    const auto& th = g.theta(k);
    const std::array<int, 2> step{1, g.nx()};
    Vec2 grad;
    for (int axis = 0; axis < 2; ++axis) {
      const int kp = k + step[axis];
      const int km = k - step[axis];
      const double tp = th[2 * axis];
      const double tm = th[2 * axis + 1];
      const bool ip = g.inside(kp);
      const bool im = g.inside(km);
      double d = 0.0;
      if (ip && im) {
        d = (u[kp] - u[km]) / (2.0 * h);
      } else if (dirichlet) {
        // Quadratic through (-a, fm), (0, f0), (b, fp) with zero at cut points.
        const double a = tm * h;
        const double b = tp * h;
        const double fm = im ? u[km] : 0.0;
        const double fp = ip ? u[kp] : 0.0;
        d = -b / (a * (a + b)) * fm + (b - a) / (a * b) * u[k] + a / (b * (a + b)) * fp;
      } else if (ip) {
        const int kpp = kp + step[axis];
        d = g.inside(kpp) ? (-3.0 * u[k] + 4.0 * u[kp] - u[kpp]) / (2.0 * h) : (u[kp] - u[k]) / h;
      } else if (im) {
        const int kmm = km - step[axis];
        d = g.inside(kmm) ? (3.0 * u[k] - 4.0 * u[km] + u[kmm]) / (2.0 * h) : (u[k] - u[km]) / h;
      }
      grad[axis] = d;
    }
    out[k] = grad;
  }
  return out;
}

std::vector<double> extended_values(const ScalarField& field) {
  std::vector<double> ext = field.values;
  const bool dirichlet = field.extension == Extension::DirichletZero;
  for (const auto& st : field.grid->ghosts()) {
    const auto& ws = dirichlet ? st.dirichlet : st.extrapolate;
    if (ws.empty()) continue;
    double v = 0.0;
    for (const auto& [idx, w] : ws) v += w * field.values[idx];
    ext[st.node] = v;
  }
  return ext;
}

std::vector<Vec2> extended_values(const VectorField& field) {
  std::vector<Vec2> ext = field.values;
  for (const auto& st : field.grid->ghosts()) {
    if (st.extrapolate.empty()) continue;
    Vec2 v = Vec2::Zero();
    for (const auto& [idx, w] : st.extrapolate) v += w * field.values[idx];
    ext[st.node] = v;
  }
  return ext;
}

FieldSampler::FieldSampler(const ScalarField& field) : grid_(field.grid), ext_(extended_values(field)) {}

FieldSampler::FieldSampler(GridPtr grid, std::vector<double> extended)
    : grid_(std::move(grid)), ext_(std::move(extended)) {}

double FieldSampler::try_at(const Vec2& p) const {
  double v = 0.0;
  if (!bilinear(*grid_, ext_, p, v, &finite_scalar)) return kNaN;
  return v;
}

double FieldSampler::operator()(const Vec2& p) const {
  const double v = try_at(p);
  if (std::isnan(v)) throw DomainError("interpolate: point outside the dilated inside region");
  return v;
}

VectorSampler::VectorSampler(const VectorField& field) : grid_(field.grid), ext_(extended_values(field)) {}

bool VectorSampler::try_at(const Vec2& p, Vec2& out) const {
  return bilinear(*grid_, ext_, p, out, &finite_vec);
}

Vec2 VectorSampler::operator()(const Vec2& p) const {
  Vec2 v;
  if (!try_at(p, v)) throw DomainError("interpolate: point outside the dilated inside region");
  return v;
}

double interpolate(const ScalarField& field, const Vec2& point) { return FieldSampler(field)(point); }

Vec2 interpolate(const VectorField& field, const Vec2& point) { return VectorSampler(field)(point); }

// ---------------------------------------------------------------------------
// Convexity tools
// ---------------------------------------------------------------------------

ScalarField convex_envelope(const ScalarField& field) {
  const Grid& g = *field.grid;
  // Digital convexity: inside nodes form one contiguous run per row and column.
  for (int pass = 0; pass < 2; ++pass) {
    const int outer = pass == 0 ? g.ny() : g.nx();
    const int inner = pass == 0 ? g.nx() : g.ny();
    for (int a = 0; a < outer; ++a) {
      int runs = 0;
      bool prev = false;
      for (int b = 0; b < inner; ++b) {
        const bool in = pass == 0 ? g.inside(g.index(b, a)) : g.inside(g.index(a, b));
        if (in && !prev) ++runs;
        prev = in;
      }
      if (runs > 1) throw UnsupportedError("convex_envelope: inside mask is not convex");
    }
  }
  std::vector<Vec2> xy;
  std::vector<double> z;
  std::vector<int> ids;
  for (int k = 0; k < g.size(); ++k) {
    if (!g.inside(k)) continue;
    if (!std::isfinite(field.values[k])) throw InvalidInput("convex_envelope: non-finite inside value");
    xy.push_back(g.node(k));
    z.push_back(field.values[k]);
    ids.push_back(k);
  }
  const auto env = lower_convex_envelope(xy, z);
  ScalarField out(field.grid, field.extension);
  for (std::size_t q = 0; q < ids.size(); ++q) out.values[ids[q]] = env[q];
  return out;
}

ConcavityDeficit midpoint_concavity_deficit(const ScalarField& field, int sample_count, std::uint64_t rng_seed) {
  if (sample_count < 1000) throw InvalidInput("midpoint_concavity_deficit: sample_count must be >= 1000");
  const Grid& g = *field.grid;
  const FieldSampler f(field);
  const auto bb = g.domain().bounding_box();
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> ux(bb.lo.x(), bb.hi.x());
  std::uniform_real_distribution<double> uy(bb.lo.y(), bb.hi.y());
  std::uniform_real_distribution<double> ul(0.0, 1.0);
  auto draw = [&]() {
    while (true) {
      const Vec2 p(ux(rng), uy(rng));
      if (g.domain().signed_distance(p) > 0.0) return p;
    }
  };
  ConcavityDeficit out;
  out.worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < sample_count; ++s) {
    const Vec2 x = draw();
    const Vec2 y = draw();
    const double lambda = (s % 2 == 0) ? 0.5 : ul(rng);
    const Vec2 m = lambda * x + (1.0 - lambda) * y;
    const double fx = f.try_at(x), fy = f.try_at(y), fm = f.try_at(m);
    if (std::isnan(fx) || std::isnan(fy) || std::isnan(fm)) continue;
    const double deficit = lambda * fx + (1.0 - lambda) * fy - fm;
    ++out.samples;
    if (deficit > out.worst) {
      out.worst = deficit;
      out.x = x;
      out.y = y;
      out.lambda = lambda;
    }
  }
  return out;
}

std::vector<std::uint8_t> high_ridge_mask(const Grid& grid, double tol) {
  std::vector<std::uint8_t> mask(grid.size(), 0);
  for (int k = 0; k < grid.size(); ++k) {
    mask[k] = grid.inside(k) && grid.signed_distance(k) >= grid.inradius() - tol ? 1 : 0;
  }
  return mask;
}

std::vector<std::uint8_t> cut_locus_mask(const Grid& grid, double angular_tol) {
  std::vector<std::uint8_t> mask(grid.size(), 0);
  for (int k = 0; k < grid.size(); ++k) {
    if (!grid.inside(k)) continue;
    const Vec2 x = grid.node(k);
    const auto pr = grid.domain().probe(x, grid.h());
    const auto& ys = pr.nearest_boundary_points;
    for (std::size_t i = 0; i < ys.size() && !mask[k]; ++i) {
      for (std::size_t j = i + 1; j < ys.size(); ++j) {
        const Vec2 a = ys[i] - x, b = ys[j] - x;
        const double ang = std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b));
        if (ang > angular_tol) {
          mask[k] = 1;
          break;
        }
      }
    }
  }
  return mask;
}

std::vector<double> distance_to_mask(const Grid& grid, std::span<const std::uint8_t> mask) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const int nx = grid.nx(), ny = grid.ny();
  std::vector<double> d2(grid.size(), inf);
  std::vector<double> col(std::max(nx, ny)), res(std::max(nx, ny));
  std::vector<int> arg(std::max(nx, ny));
  for (int k = 0; k < grid.size(); ++k) d2[k] = mask[k] ? 0.0 : inf;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) col[i] = d2[grid.index(i, j)];
    detail::parabola_envelope(std::span(col.data(), nx), 1.0, std::span(res.data(), nx), std::span(arg.data(), nx));
    for (int i = 0; i < nx; ++i) d2[grid.index(i, j)] = res[i];
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) col[j] = d2[grid.index(i, j)];
    detail::parabola_envelope(std::span(col.data(), ny), 1.0, std::span(res.data(), ny), std::span(arg.data(), ny));
    for (int j = 0; j < ny; ++j) d2[grid.index(i, j)] = res[j];
  }
  std::vector<double> out(grid.size());
  for (int k = 0; k < grid.size(); ++k) out[k] = std::sqrt(d2[k]) * grid.h();
  return out;
}

}  // namespace inflap
