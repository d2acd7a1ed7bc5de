#pragma once

#include <vector>

#include "mgibbs/covariate.hpp"
#include "mgibbs/model.hpp"
#include "mgibbs/pattern.hpp"
#include "mgibbs/rng.hpp"

namespace testutil {

using namespace mgibbs;

inline MultiTypePattern random_pattern(const Window& w, int p, int n,
                                       RngStream& rng) {
  MultiTypePattern pat(w, p);
  for (int i = 0; i < n; ++i) {
    pat.add(rng.uniform(w.x_min, w.x_max), rng.uniform(w.y_min, w.y_max),
            1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(p))));
  }
  return pat;
}

// Random spec: 1-3 steps per pair, random family, saturations in 1..3.
inline ModelSpec random_spec(int p, RngStream& rng, double scale = 1.0,
                             int covariates = 0) {
  ModelSpec spec;
  spec.p = p;
  spec.family = rng.uniform() < 0.5 ? InteractionFamily::strauss
                                    : InteractionFamily::saturation;
  spec.covariate_count = covariates;
  spec.ranges.resize(static_cast<std::size_t>(pair_count(p)));
  for (auto& r : spec.ranges) {
    const int steps = 1 + static_cast<int>(rng.uniform_index(3));
    double v = 0.0;
    for (int k = 0; k < steps; ++k) {
      v += scale * rng.uniform(0.05, 0.3);
      r.push_back(v);
    }
  }
  spec.saturations.resize(static_cast<std::size_t>(p) * p);
  for (int i = 1; i <= p; ++i) {
    for (int j = 1; j <= p; ++j) {
      auto& c = spec.saturations[static_cast<std::size_t>((i - 1) * p + (j - 1))];
      for (std::size_t k = 0; k < spec.pair_ranges(i, j).size(); ++k) {
        c.push_back(1 + static_cast<int>(rng.uniform_index(3)));
      }
    }
  }
  return spec;
}

// Dyadic-valued coefficients keep brute-force statistic sums exact in
// double arithmetic.
inline double dyadic(RngStream& rng, int denom = 64) {
  return static_cast<double>(static_cast<int>(rng.uniform_index(
             static_cast<std::uint64_t>(2 * denom + 1))) - denom) /
         denom;
}

inline std::vector<double> random_theta(const GroupLayout& layout,
                                        RngStream& rng) {
  std::vector<double> theta(static_cast<std::size_t>(layout.dim));
  for (double& v : theta) v = dyadic(rng);
  return theta;
}

// Piecewise-constant covariate with dyadic values.
inline CovariateField dyadic_field(const Window& w, int cells, RngStream& rng) {
  CovariateField f = CovariateField::over_window(
      w, std::max(w.width(), w.height()) / cells);
  for (double& v : f.values) v = dyadic(rng, 16);
  return f;
}

}  // namespace testutil
