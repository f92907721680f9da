#pragma once

#include "inflap/geometry.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace inflap {

/// How values are continued across the boundary when a stencil or an
/// interpolation cell reaches outside nodes.
enum class Extension {
  /// Field vanishes on the boundary: outside values are the linear
  /// continuation through zero along the inward normal.
  DirichletZero,
  /// Generic field: linear extrapolation along the inward normal.
  Extrapolate,
};

/// Axis directions used for cut-cell data: +x, -x, +y, -y.
enum Axis : int { kPlusX = 0, kMinusX = 1, kPlusY = 2, kMinusY = 3 };

/// Weights reconstructing an outside node from inside nodes.
struct GhostStencil {
  int node = -1;
  double sigma = 0.0;  // distance to the boundary
  std::vector<std::pair<int, double>> dirichlet;
  std::vector<std::pair<int, double>> extrapolate;
};

/// Uniform Cartesian lattice covering a Domain with a margin of outside nodes.
class Grid {
 public:
  Grid(Domain domain, int resolution);

  const Domain& domain() const { return domain_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int size() const { return nx_ * ny_; }
  double h() const { return h_; }
  const Vec2& origin() const { return origin_; }
  double inradius() const { return rho_; }

  int index(int i, int j) const { return j * nx_ + i; }
  int column(int k) const { return k % nx_; }
  int row(int k) const { return k / nx_; }
  Vec2 node(int k) const { return origin_ + h_ * Vec2(column(k), row(k)); }
  Vec2 node(int i, int j) const { return origin_ + h_ * Vec2(i, j); }

  bool inside(int k) const { return inside_[k] != 0; }
  double signed_distance(int k) const { return sdist_[k]; }
  int inside_count() const { return inside_count_; }

  /// Cut-cell fraction theta in (0,1] towards the boundary along each axis;
  /// exactly 1 when the neighbour is inside.
  const std::array<double, 4>& theta(int k) const { return theta_[k]; }

  const std::vector<GhostStencil>& ghosts() const { return ghosts_; }
  /// Width of the outside band reconstructed by ghost stencils.
  double ghost_band() const { return 2.5 * h_; }

 private:
  void build_band();
  void build_ghosts();

  Domain domain_;
  int nx_ = 0;
  int ny_ = 0;
  double h_ = 0.0;
  Vec2 origin_ = Vec2::Zero();
  double rho_ = 0.0;
  int inside_count_ = 0;
  std::vector<double> sdist_;
  std::vector<std::uint8_t> inside_;
  std::vector<std::array<double, 4>> theta_;
  std::vector<GhostStencil> ghosts_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// resolution >= 16; h = (longest bounding-box side) / resolution.
GridPtr build_grid(const Domain& domain, int resolution);

/// Node values over a grid; NaN exactly on outside nodes.
struct ScalarField {
  GridPtr grid;
  std::vector<double> values;
  Extension extension = Extension::Extrapolate;

  ScalarField() = default;
  ScalarField(GridPtr g, Extension ext = Extension::Extrapolate);

  double operator[](int k) const { return values[k]; }
  double& operator[](int k) { return values[k]; }

  /// Evaluates f at every inside node.
  template <typename F>
  static ScalarField sample(GridPtr g, F&& f, Extension ext = Extension::Extrapolate) {
    ScalarField out(g, ext);
    for (int k = 0; k < g->size(); ++k) {
      if (g->inside(k)) out.values[k] = f(g->node(k));
    }
    return out;
  }

  double max_inside() const;
  bool mask_consistent() const;
};

struct VectorField {
  GridPtr grid;
  std::vector<Vec2> values;

  VectorField() = default;
  explicit VectorField(GridPtr g);

  const Vec2& operator[](int k) const { return values[k]; }
  Vec2& operator[](int k) { return values[k]; }
};

/// Cut-cell (Shortley-Weller) gradient. Interior nodes use centred
/// differences; near the boundary DirichletZero fields use the zero value at
/// the cut point, other fields use one-sided differences.
VectorField gradient(const ScalarField& field);

/// Node values continued into the ghost band (NaN beyond it).
std::vector<double> extended_values(const ScalarField& field);
std::vector<Vec2> extended_values(const VectorField& field);

/// Bilinear interpolation on a precomputed extended array.
class FieldSampler {
 public:
  explicit FieldSampler(const ScalarField& field);
  FieldSampler(GridPtr grid, std::vector<double> extended);

  /// Throws DomainError when the enclosing cell has an undefined corner.
  double operator()(const Vec2& p) const;
  /// NaN instead of throwing.
  double try_at(const Vec2& p) const;
  const Grid& grid() const { return *grid_; }
  const std::vector<double>& extended() const { return ext_; }

 private:
  GridPtr grid_;
  std::vector<double> ext_;
};

class VectorSampler {
 public:
  explicit VectorSampler(const VectorField& field);
  Vec2 operator()(const Vec2& p) const;
  /// Returns false when the point is outside the reconstructed band.
  bool try_at(const Vec2& p, Vec2& out) const;

 private:
  GridPtr grid_;
  std::vector<Vec2> ext_;
};

double interpolate(const ScalarField& field, const Vec2& point);
Vec2 interpolate(const VectorField& field, const Vec2& point);

/// Largest discrete convex function below the input (lower convex hull of the
/// lifted inside nodes evaluated back at the nodes).
ScalarField convex_envelope(const ScalarField& field);

struct ConcavityDeficit {
  double worst = 0.0;  // positive means a concavity violation
  Vec2 x = Vec2::Zero();
  Vec2 y = Vec2::Zero();
  double lambda = 0.5;
  int samples = 0;
};

/// max over random segments of lambda f(x) + (1-lambda) f(y) - f(lambda x + (1-lambda) y).
ConcavityDeficit midpoint_concavity_deficit(const ScalarField& field, int sample_count,
                                            std::uint64_t rng_seed);

/// Nodes with d >= rho - tol.
std::vector<std::uint8_t> high_ridge_mask(const Grid& grid, double tol);
/// Inside nodes with two near-nearest boundary points (distance slack h)
/// subtending an angle larger than `angular_tol` at the node.
std::vector<std::uint8_t> cut_locus_mask(const Grid& grid, double angular_tol);

/// Exact Euclidean distance (in length units) from every node to the nearest
/// node with mask set; +inf when the mask is empty.
std::vector<double> distance_to_mask(const Grid& grid, std::span<const std::uint8_t> mask);

}  // namespace inflap
