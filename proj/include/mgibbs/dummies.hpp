#pragma once

#include <vector>

#include "mgibbs/pattern.hpp"
#include "mgibbs/rng.hpp"

namespace mgibbs {

struct DummySpec {
  double intensity_factor = 4.0;
  int min_per_type = 500;
};

struct DummySet {
  MultiTypePattern points;
  std::vector<double> rho;  // per-type dummy intensity m_i / |W|, index 0 unused
};

// Stratified-uniform dummies: per type i, m_i = max(ceil(factor * n_i),
// min_per_type) points, one uniform point in each of m_i cells drawn from an
// aspect-balanced tiling of the window.
DummySet generate_dummies(const Window& window,
                          const std::vector<int>& counts_by_type,
                          const DummySpec& spec, RngStream rng);

}  // namespace mgibbs
