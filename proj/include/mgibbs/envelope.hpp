#pragma once

#include "mgibbs/cross_k.hpp"

namespace mgibbs {

struct StudentisedResult {
  double p = 1.0;
  double statistic = 0.0;
  int dropped_ranges = 0;  // grid points with zero null sd
};

// Studentised deviation test: T_b = sum_r [(K_b(r) - m(r)) / s(r)]^2 with the
// pointwise null mean and sd; p = (1 + #{b >= 1 : T_b >= T_0}) / (s + 1).
StudentisedResult studentised_deviation_test(const CurveSet& curves);

struct RankEnvelopeResult {
  double p_lower = 1.0;
  double p_upper = 1.0;  // ties counted as extreme; the decision value
  int extreme_rank = 0;  // data curve's extreme rank
};

// Rank envelope test: pointwise two-sided ranks among all s+1 curves (ties
// raise the rank, i.e. count as less extreme pointwise), extreme rank is the
// minimum over the grid, and the p-interval comes from the null distribution
// of extreme ranks with ties handled conservatively in p_upper.
RankEnvelopeResult rank_envelope_test(const CurveSet& curves);

}  // namespace mgibbs
