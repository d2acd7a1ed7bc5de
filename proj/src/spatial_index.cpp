#include "mgibbs/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgibbs {

SpatialIndex::SpatialIndex(const MultiTypePattern& pattern, double cell_side)
    : pattern_(&pattern) {
  const Window& w = pattern.window;
  // Clamp so tiny or zero ranges still give a sane grid.
  const double max_side = std::max(w.width(), w.height());
  cell_side_ = std::clamp(cell_side, max_side / 512.0, max_side);
  nx_ = std::max(1, static_cast<int>(std::ceil(w.width() / cell_side_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(w.height() / cell_side_)));
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const std::size_t cell =
        static_cast<std::size_t>(cell_of_y(pattern.y[i])) * nx_ +
        cell_of_x(pattern.x[i]);
    cells_[cell].push_back(static_cast<std::int64_t>(i));
  }
}

int SpatialIndex::cell_of_x(double x) const {
  int c = static_cast<int>((x - pattern_->window.x_min) / cell_side_);
  return std::clamp(c, 0, nx_ - 1);
}

int SpatialIndex::cell_of_y(double y) const {
  int c = static_cast<int>((y - pattern_->window.y_min) / cell_side_);
  return std::clamp(c, 0, ny_ - 1);
}

int SpatialIndex::count_annulus(const Point& center, int target_type,
                                double r_lo, double r_hi,
                                std::int64_t exclude_id) const {
  if (r_lo < 0.0 || !(r_lo < r_hi)) {
    throw std::invalid_argument("annulus radii must satisfy 0 <= r_lo < r_hi");
  }
  const double lo2 = r_lo * r_lo;
  const double hi2 = r_hi * r_hi;
  int count = 0;
  visit_cells(center, r_hi, [&](std::size_t cell) {
    for (std::int64_t id : cells_[cell]) {
      if (id == exclude_id) continue;
      const std::size_t i = static_cast<std::size_t>(id);
      if (target_type != 0 && pattern_->type[i] != target_type) continue;
      const double dx = pattern_->x[i] - center.x;
      const double dy = pattern_->y[i] - center.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 > lo2 && d2 <= hi2) ++count;
    }
  });
  return count;
}

}  // namespace mgibbs
