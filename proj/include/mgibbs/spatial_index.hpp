#pragma once

#include <cstdint>
#include <vector>

#include "mgibbs/pattern.hpp"

namespace mgibbs {

// Uniform-grid index over a pattern for annulus/disc neighbour queries.
// Immutable after construction; concurrent reads are safe.
//
// Annulus convention used throughout: a point y is a neighbour of `center`
// in step (r_lo, r_hi] iff r_lo < ||center-y|| <= r_hi (set difference of
// closed balls). Self-exclusion is by point identity, never by zero
// distance, so coincident points are handled consistently.
class SpatialIndex {
 public:
  // `cell_side` defaults to the maximum query radius the caller expects
  // (queries beyond it still work, they just visit more cells).
  SpatialIndex(const MultiTypePattern& pattern, double cell_side);

  const MultiTypePattern& pattern() const { return *pattern_; }

  // #{y of target_type : r_lo < ||center-y|| <= r_hi, y != exclude_id}.
  // Pass exclude_id < 0 to exclude nothing.
  int count_annulus(const Point& center, int target_type, double r_lo,
                    double r_hi, std::int64_t exclude_id = -1) const;

  // Visit ids of points of target_type with ||center-y|| <= r_hi (excluding
  // exclude_id). Visit order is deterministic: cell-major, insertion order
  // within a cell.
  template <class Fn>
  void for_each_in_disc(const Point& center, int target_type, double r_hi,
                        std::int64_t exclude_id, Fn&& fn) const {
    const double r2 = r_hi * r_hi;
    visit_cells(center, r_hi, [&](std::size_t cell) {
      for (std::int64_t id : cells_[cell]) {
        if (id == exclude_id) continue;
        const std::size_t i = static_cast<std::size_t>(id);
        if (target_type != 0 && pattern_->type[i] != target_type) continue;
        const double dx = pattern_->x[i] - center.x;
        const double dy = pattern_->y[i] - center.y;
        if (dx * dx + dy * dy <= r2) fn(i);
      }
    });
  }

  double cell_side() const { return cell_side_; }

 private:
  template <class Fn>
  void visit_cells(const Point& center, double radius, Fn&& fn) const {
    const int reach = static_cast<int>(radius / cell_side_) + 1;
    const int cx = cell_of_x(center.x);
    const int cy = cell_of_y(center.y);
    for (int gy = cy - reach; gy <= cy + reach; ++gy) {
      if (gy < 0 || gy >= ny_) continue;
      for (int gx = cx - reach; gx <= cx + reach; ++gx) {
        if (gx < 0 || gx >= nx_) continue;
        fn(static_cast<std::size_t>(gy) * nx_ + gx);
      }
    }
  }

  int cell_of_x(double x) const;
  int cell_of_y(double y) const;

  const MultiTypePattern* pattern_;
  double cell_side_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::vector<std::int64_t>> cells_;
};

}  // namespace mgibbs
