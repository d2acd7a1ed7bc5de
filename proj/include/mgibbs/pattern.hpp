#pragma once

#include <vector>

#include "mgibbs/geometry.hpp"

namespace mgibbs {

// A labelled point set in a rectangular window. Types are 1-based and
// contiguous 1..p; empty types are allowed. Coincident points are permitted:
// census data contains them, and identity (index), not distance, is what
// distinguishes points.
struct MultiTypePattern {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<int> type;  // values in 1..p
  int p = 0;
  Window window;

  MultiTypePattern() = default;
  MultiTypePattern(Window w, int type_count) : p(type_count), window(w) {}

  std::size_t size() const { return x.size(); }
  Point point(std::size_t i) const { return Point{x[i], y[i]}; }

  void add(double px, double py, int t);

  // Per-type point counts n_1..n_p (index 0 unused).
  std::vector<int> counts_by_type() const;

  // Points with locations inside `region`; p and type indexing preserved.
  MultiTypePattern subset_in_region(const Window& region) const;

  // Throws if a point lies outside the window or a type label is out of range.
  void validate() const;
};

}  // namespace mgibbs
