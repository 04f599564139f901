#pragma once

// Brute-force reference implementations used only by tests. Each one is kept
// deliberately independent of the library's algorithmic path.

#include <cmath>
#include <limits>
#include <vector>

#include "randex/envelope.hpp"

namespace oracles {

// O(n*m) discrete conjugate: literal sup over all samples.
inline std::vector<double> conjugate_bruteforce(const std::vector<double>& xs,
                                                const std::vector<double>& fs,
                                                const std::vector<double>& slopes) {
  std::vector<double> out(slopes.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < slopes.size(); ++s)
    for (std::size_t i = 0; i < xs.size(); ++i)
      out[s] = std::max(out[s], slopes[s] * xs[i] - fs[i]);
  return out;
}

// Lower convex hull value at a query point by enumerating all convex
// combinations of one, two, or three samples (enough in the plane).
inline double convenv_bruteforce(const std::vector<randex::detail_env::Sample>& pts,
                                 double pw, double pt) {
  const double eps = 1e-9;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(pts[i].w - pw) < eps && std::fabs(pts[i].t - pt) < eps)
      best = std::min(best, pts[i].f);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double dw = pts[j].w - pts[i].w, dt = pts[j].t - pts[i].t;
      double qw = pw - pts[i].w, qt = pt - pts[i].t;
      double cross = dw * qt - dt * qw;
      double len2 = dw * dw + dt * dt;
      if (len2 < eps * eps || std::fabs(cross) > eps * std::sqrt(len2)) continue;
      double s = (qw * dw + qt * dt) / len2;
      if (s < -eps || s > 1.0 + eps) continue;
      s = std::min(1.0, std::max(0.0, s));
      best = std::min(best, (1.0 - s) * pts[i].f + s * pts[j].f);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        double det = (pts[j].w - pts[i].w) * (pts[k].t - pts[i].t) -
                     (pts[k].w - pts[i].w) * (pts[j].t - pts[i].t);
        if (std::fabs(det) < 1e-12) continue;
        double b1 = ((pw - pts[i].w) * (pts[k].t - pts[i].t) -
                     (pts[k].w - pts[i].w) * (pt - pts[i].t)) / det;
        double b2 = ((pts[j].w - pts[i].w) * (pt - pts[i].t) -
                     (pw - pts[i].w) * (pts[j].t - pts[i].t)) / det;
        double b0 = 1.0 - b1 - b2;
        if (b0 < -eps || b1 < -eps || b2 < -eps) continue;
        best = std::min(best, b0 * pts[i].f + b1 * pts[j].f + b2 * pts[k].f);
      }
  return best;
}

}  // namespace oracles
