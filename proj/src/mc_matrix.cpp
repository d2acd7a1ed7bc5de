#include "mgibbs/mc_matrix.hpp"

#include <stdexcept>

#include "mgibbs/envelope.hpp"
#include "mgibbs/kernel_intensity.hpp"
#include "mgibbs/simulate.hpp"

namespace mgibbs {

McMatrixResult interaction_test_matrix(const MultiTypePattern& pattern,
                                       const McOptions& options,
                                       RngStream rng) {
  if (options.sims < 19) {
    throw std::invalid_argument("need at least 19 null simulations");
  }
  if (options.r_grid.empty()) {
    throw std::invalid_argument("empty range grid");
  }
  const int p = pattern.p;
  const std::vector<int> counts = pattern.counts_by_type();
  for (int t = 1; t <= p; ++t) {
    if (counts[static_cast<std::size_t>(t)] == 0) {
      throw std::invalid_argument("type " + std::to_string(t) + " is empty");
    }
  }

  // Per-type sub-patterns and kernel intensities for the IPP nulls.
  std::vector<std::vector<Point>> pts(static_cast<std::size_t>(p) + 1);
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    pts[static_cast<std::size_t>(pattern.type[i])].push_back(
        Point{pattern.x[i], pattern.y[i]});
  }
  std::vector<CovariateField> intensity(static_cast<std::size_t>(p) + 1);
#pragma omp parallel for schedule(dynamic)
  for (int t = 1; t <= p; ++t) {
    intensity[static_cast<std::size_t>(t)] =
        kernel_intensity(pattern, t, options.bandwidth, options.cell);
  }

  McMatrixResult result;
  result.indicators = InteractionMatrix(p);
  result.p_values.assign(static_cast<std::size_t>(p) * p, 1.0);
  result.p_lower.assign(static_cast<std::size_t>(p) * p, 1.0);

#pragma omp parallel for schedule(dynamic) collapse(2)
  for (int i = 1; i <= p; ++i) {
    for (int j = 1; j <= p; ++j) {
      // Bivariate carrier pattern: type 1 = fixed x_i, type 2 = x_j slot.
      const bool diag = i == j;
      MultiTypePattern carrier(pattern.window, diag ? 1 : 2);
      if (!diag) {
        for (const Point& q : pts[static_cast<std::size_t>(i)]) {
          carrier.add(q.x, q.y, 1);
        }
      }
      const int slot_type = diag ? 1 : 2;
      auto with_j = [&](const std::vector<Point>& qs) {
        MultiTypePattern full = carrier;
        for (const Point& q : qs) full.add(q.x, q.y, slot_type);
        return full;
      };
      CurveSet curves;
      curves.r_grid = options.r_grid;
      curves.data = diag ? cross_k(with_j(pts[static_cast<std::size_t>(i)]), 1,
                                   1, options.r_grid)
                         : cross_k(with_j(pts[static_cast<std::size_t>(j)]), 1,
                                   2, options.r_grid);
      curves.nulls.resize(static_cast<std::size_t>(options.sims));
      for (int b = 0; b < options.sims; ++b) {
        RngStream stream = rng.substream(
            static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j),
            static_cast<std::uint64_t>(b + 1));
        const MultiTypePattern sim =
            sim_ipp(pattern.window, intensity[static_cast<std::size_t>(j)],
                    counts[static_cast<std::size_t>(j)], stream);
        std::vector<Point> qs;
        for (std::size_t q = 0; q < sim.size(); ++q) {
          qs.push_back(Point{sim.x[q], sim.y[q]});
        }
        curves.nulls[static_cast<std::size_t>(b)] =
            diag ? cross_k(with_j(qs), 1, 1, options.r_grid)
                 : cross_k(with_j(qs), 1, 2, options.r_grid);
      }
      transform_sqrt(curves);
      double p_value, p_low;
      if (options.test == McTest::studentised) {
        p_value = p_low = studentised_deviation_test(curves).p;
      } else {
        const RankEnvelopeResult r = rank_envelope_test(curves);
        p_value = r.p_upper;
        p_low = r.p_lower;
      }
      const std::size_t at =
          static_cast<std::size_t>(i - 1) * p + static_cast<std::size_t>(j - 1);
      result.p_values[at] = p_value;
      result.p_lower[at] = p_low;
      result.indicators.indicator[at] = p_value < options.alpha ? 1 : 0;
      result.indicators.score[at] = p_value;
    }
  }
  return result;
}

}  // namespace mgibbs
