#pragma once

#include <limits>
#include <span>
#include <vector>

namespace inflap::detail {

/// out[q] = min_p f[p] + scale * (q - p)^2 over p with finite f[p]
/// (lower envelope of parabolas, linear time). arg[q] receives a minimising
/// index; -1 when every f[p] is +inf.
inline void parabola_envelope(std::span<const double> f, double scale, std::span<double> out,
                              std::span<int> arg) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (!(f[q] < inf)) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    while (true) {
      const int p = v[k];
      const double s = ((f[q] + scale * q * q) - (f[p] + scale * p * p)) / (2.0 * scale * (q - p));
      if (s <= z[k]) {
        --k;
        if (k < 0) {
          k = 0;
          v[0] = q;
          z[0] = -inf;
          z[1] = inf;
          break;
        }
        continue;
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = inf;
      break;
    }
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) {
      out[q] = inf;
      arg[q] = -1;
    }
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const int p = v[j];
    out[q] = f[p] + scale * (q - p) * (q - p);
    arg[q] = p;
  }
}

}  // namespace inflap::detail
