#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace randex {

// A product grid: one sorted point set per axis.
struct Gridding {
  std::vector<std::vector<double>> axes;

  void validate() const {
    if (axes.empty()) throw std::invalid_argument("Gridding: no axes");
    for (const auto& ax : axes) {
      if (ax.size() < 2) throw std::invalid_argument("Gridding: axis needs >= 2 points");
      for (std::size_t i = 1; i < ax.size(); ++i)
        if (!(ax[i] > ax[i - 1])) throw std::invalid_argument("Gridding: axis not strictly increasing");
    }
  }

  std::size_t point_count() const {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= ax.size();
    return n;
  }
};

inline Gridding uniform_grid(const std::vector<std::pair<double, double>>& ranges, std::size_t points_per_axis) {
  Gridding g;
  for (auto [a, b] : ranges) {
    std::vector<double> ax(points_per_axis);
    for (std::size_t i = 0; i < points_per_axis; ++i)
      ax[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(points_per_axis - 1);
    g.axes.push_back(std::move(ax));
  }
  g.validate();
  return g;
}

// Index of the largest grid value on one axis that does not exceed x.
inline std::size_t floor_index(const std::vector<double>& axis, double x) {
  if (x < axis.front()) throw std::out_of_range("grid_floor: point below grid");
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  return static_cast<std::size_t>(it - axis.begin()) - 1;
}

// Component-wise grid floor. Throws if any coordinate is outside the rectangle.
inline std::vector<double> grid_floor(const Gridding& g, const std::vector<double>& x) {
  if (x.size() != g.axes.size()) throw std::invalid_argument("grid_floor: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    const auto& ax = g.axes[d];
    if (x[d] > ax.back() + 1e-12) throw std::out_of_range("grid_floor: point above grid");
    out[d] = ax[std::min(floor_index(ax, x[d]), ax.size() - 1)];
  }
  return out;
}

}  // namespace randex
