#include "mgibbs/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgibbs {

namespace {

void check(const CurveSet& curves) {
  if (curves.nulls.empty()) throw std::invalid_argument("no null curves");
  for (const auto& c : curves.nulls) {
    if (c.size() != curves.data.size()) {
      throw std::invalid_argument("curves must share the grid");
    }
  }
}

}  // namespace

StudentisedResult studentised_deviation_test(const CurveSet& curves) {
  check(curves);
  const std::size_t nr = curves.data.size();
  const int s = curves.sims();
  std::vector<double> mean(nr, 0.0), sd(nr, 0.0);
  for (const auto& c : curves.nulls) {
    for (std::size_t r = 0; r < nr; ++r) mean[r] += c[r];
  }
  for (std::size_t r = 0; r < nr; ++r) mean[r] /= s;
  for (const auto& c : curves.nulls) {
    for (std::size_t r = 0; r < nr; ++r) {
      sd[r] += (c[r] - mean[r]) * (c[r] - mean[r]);
    }
  }
  StudentisedResult res;
  for (std::size_t r = 0; r < nr; ++r) {
    sd[r] = std::sqrt(sd[r] / std::max(s - 1, 1));
    if (sd[r] == 0.0) ++res.dropped_ranges;
  }
  auto statistic = [&](const std::vector<double>& c) {
    double t = 0.0;
    for (std::size_t r = 0; r < nr; ++r) {
      if (sd[r] == 0.0) continue;
      const double z = (c[r] - mean[r]) / sd[r];
      t += z * z;
    }
    return t;
  };
  res.statistic = statistic(curves.data);
  int at_least = 0;
  for (const auto& c : curves.nulls) {
    if (statistic(c) >= res.statistic) ++at_least;
  }
  res.p = (1.0 + at_least) / (s + 1.0);
  return res;
}

RankEnvelopeResult rank_envelope_test(const CurveSet& curves) {
  check(curves);
  const std::size_t nr = curves.data.size();
  const int s = curves.sims();
  const int total = s + 1;
  // Pointwise two-sided ranks; extreme = 1 (unique pointwise extremum).
  std::vector<int> extreme_rank(static_cast<std::size_t>(total), total);
  std::vector<double> column(static_cast<std::size_t>(total));
  for (std::size_t r = 0; r < nr; ++r) {
    column[0] = curves.data[r];
    for (int b = 0; b < s; ++b) {
      column[static_cast<std::size_t>(b + 1)] =
          curves.nulls[static_cast<std::size_t>(b)][r];
    }
    for (int b = 0; b < total; ++b) {
      int below_eq = 0, above_eq = 0;
      const double v = column[static_cast<std::size_t>(b)];
      for (int o = 0; o < total; ++o) {
        const double u = column[static_cast<std::size_t>(o)];
        if (u <= v) ++below_eq;
        if (u >= v) ++above_eq;
      }
      const int rank = std::min(below_eq, above_eq);
      extreme_rank[static_cast<std::size_t>(b)] =
          std::min(extreme_rank[static_cast<std::size_t>(b)], rank);
    }
  }
  RankEnvelopeResult res;
  res.extreme_rank = extreme_rank[0];
  int strictly = 0, ties_or_less = 0;
  for (int b = 1; b < total; ++b) {
    if (extreme_rank[static_cast<std::size_t>(b)] < extreme_rank[0]) ++strictly;
    if (extreme_rank[static_cast<std::size_t>(b)] <= extreme_rank[0]) {
      ++ties_or_less;
    }
  }
  res.p_lower = (1.0 + strictly) / total;
  res.p_upper = (1.0 + ties_or_less) / total;
  return res;
}

}  // namespace mgibbs
