#pragma once

#include <vector>

#include "mgibbs/pattern.hpp"

namespace mgibbs {

// Translation-corrected cross-K estimate on an increasing range grid:
//   K_ij(r) = |W|/(n_i n_j) sum_{x in x_i} sum_{y in x_j, y != x}
//             1(|x-y| <= r) |W| / |W n W_{x-y}|,
// with n_i (n_i - 1) normalization when i == j. Requires non-empty types and
// r_max below half the shorter window side.
std::vector<double> cross_k(const MultiTypePattern& pattern, int type_i,
                            int type_j, const std::vector<double>& r_grid);

// Monte Carlo curve bundle: the data curve plus null-simulation curves on a
// shared grid, optionally variance-stabilized by sqrt(K/pi).
struct CurveSet {
  std::vector<double> r_grid;
  std::vector<double> data;
  std::vector<std::vector<double>> nulls;
  bool transformed = false;

  int sims() const { return static_cast<int>(nulls.size()); }
};

// Apply sqrt(K/pi) in place to every curve.
void transform_sqrt(CurveSet& curves);

}  // namespace mgibbs
