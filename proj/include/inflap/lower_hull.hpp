#pragma once

#include "inflap/geometry.hpp"

#include <span>
#include <vector>

namespace inflap {

/// Values at the given sites of the largest convex function lying below the
/// lifted points (xy[i], z[i]), i.e. of the lower convex hull of the lifted
/// point cloud. Built on a 3-D quickhull with a relative coplanarity
/// tolerance of about 1e-12.
std::vector<double> lower_convex_envelope(std::span<const Vec2> xy, std::span<const double> z);

}  // namespace inflap
