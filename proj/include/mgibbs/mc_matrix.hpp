#pragma once

#include "mgibbs/cross_k.hpp"
#include "mgibbs/group_lasso.hpp"
#include "mgibbs/pattern.hpp"
#include "mgibbs/rng.hpp"

namespace mgibbs {

enum class McTest { studentised, rank };

struct McOptions {
  double bandwidth = 30.0;
  double cell = 2.0;
  std::vector<double> r_grid;
  int sims = 999;
  McTest test = McTest::studentised;
  double alpha = 0.05;
};

struct McMatrixResult {
  InteractionMatrix indicators;     // e_ij = 1(p_ij < alpha)
  std::vector<double> p_values;     // row-major; p_upper for the rank test
  std::vector<double> p_lower;      // rank test only, else equal to p_values

  double p_at(int i, int j) const {
    return p_values[static_cast<std::size_t>(i - 1) * indicators.p + (j - 1)];
  }
};

// Entry (i, j): type i held fixed, type j resampled from a conditional IPP on
// its kernel-smoothed intensity; the data cross-K curve is ranked against the
// null curves after the sqrt(K/pi) transform. The diagonal uses the
// univariate K with the type itself resampled. The matrix is intentionally
// asymmetric and never symmetrized.
McMatrixResult interaction_test_matrix(const MultiTypePattern& pattern,
                                       const McOptions& options,
                                       RngStream rng);

}  // namespace mgibbs
