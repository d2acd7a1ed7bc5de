#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mgibbs/model.hpp"
#include "mgibbs/spatial_index.hpp"

namespace mgibbs {

// Interaction statistics of the conditional intensity at a marked point
// (pos, tau): for every pair group involving tau and every range step,
//
//   omega = g(pos | neighbours) + #{neighbours y in the step whose own
//           type-tau count is below its saturation level},
//
// i.e. the new point's own (possibly saturated) neighbour count plus the
// number of existing points whose saturated counts the new point raises.
// Under the Strauss family both terms reduce to the plain annulus count.
//
// The pattern behind `index` must either exclude the marked point or contain
// it at `exclude_id`; all counts are taken with that id removed.
//
// Slot order matches the design-row layout for a point of type tau:
// intra steps of (tau,tau) first, then steps of pair {tau,j} for each
// j != tau in ascending j.

// Number of interaction slots in a row of type tau.
int interaction_slot_count(const ModelSpec& spec, int tau);

namespace detail {

// Step k (0-based) with r_{k-1} < d <= r_k, or -1 when d is outside every
// step (includes d = 0, which no annulus contains).
inline int step_of(double d2, const std::vector<double>& ranges) {
  double prev2 = 0.0;
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    const double rk2 = ranges[k] * ranges[k];
    if (d2 > prev2 && d2 <= rk2) return static_cast<int>(k);
    prev2 = rk2;
  }
  return -1;
}

}  // namespace detail

// NeOf(y_id, step_k) -> neighbour count of pattern point y for type tau in
// step k of pair {type(y), tau}, excluding y itself and the marked point.
template <class Index, class NeOf>
void omega_marked_point(const Point& pos, int tau, const ModelSpec& spec,
                        const Index& index, std::int64_t exclude_id,
                        NeOf&& ne_of, std::span<double> out) {
  const MultiTypePattern& pat = index.pattern();
  const bool saturated = spec.family == InteractionFamily::saturation;
  std::size_t slot = 0;
  auto pair_block = [&](int j) {
    const auto& ranges = spec.pair_ranges(tau, j);
    const int steps = static_cast<int>(ranges.size());
    if (steps == 0) return;
    const auto& c_fwd = spec.ordered_saturations(tau, j);
    const auto& c_rev = spec.ordered_saturations(j, tau);
    std::span<double> block = out.subspan(slot, static_cast<std::size_t>(steps));
    slot += static_cast<std::size_t>(steps);
    for (int k = 0; k < steps; ++k) block[static_cast<std::size_t>(k)] = 0.0;
    std::vector<int> own(static_cast<std::size_t>(steps), 0);
    index.for_each_in_disc(pos, j, ranges.back(), exclude_id, [&](std::size_t y) {
      const double d2 = squared_distance(pos, Point{pat.x[y], pat.y[y]});
      const int k = detail::step_of(d2, ranges);
      if (k < 0) return;
      own[static_cast<std::size_t>(k)]++;
      if (!saturated ||
          ne_of(y, k) < c_rev[static_cast<std::size_t>(k)]) {
        block[static_cast<std::size_t>(k)] += 1.0;
      }
    });
    for (int k = 0; k < steps; ++k) {
      const int g = saturated
                        ? std::min(own[static_cast<std::size_t>(k)],
                                   c_fwd[static_cast<std::size_t>(k)])
                        : own[static_cast<std::size_t>(k)];
      block[static_cast<std::size_t>(k)] += static_cast<double>(g);
    }
  };
  pair_block(tau);
  for (int j = 1; j <= spec.p; ++j) {
    if (j != tau) pair_block(j);
  }
}

// Convenience form computing inner neighbour counts by live index queries.
// The excluded point may sit anywhere in the index (the MH sampler evaluates
// proposals away from the point's stored position), so its membership in y's
// annulus is checked against its actual coordinates.
template <class Index>
void omega_with_queries(const Point& pos, int tau, const ModelSpec& spec,
                        const Index& index, std::int64_t exclude_id,
                        std::span<double> out) {
  const MultiTypePattern& pat = index.pattern();
  auto ne_of = [&](std::size_t y, int k) {
    const int ytype = pat.type[y];
    const auto& ranges = spec.pair_ranges(ytype, tau);
    const double r_lo = k == 0 ? 0.0 : ranges[static_cast<std::size_t>(k - 1)];
    const double r_hi = ranges[static_cast<std::size_t>(k)];
    const Point ypos{pat.x[y], pat.y[y]};
    int n = index.count_annulus(ypos, tau, r_lo, r_hi,
                                static_cast<std::int64_t>(y));
    if (exclude_id >= 0 && static_cast<std::size_t>(exclude_id) != y &&
        pat.type[static_cast<std::size_t>(exclude_id)] == tau) {
      const double d2 = squared_distance(
          ypos, Point{pat.x[static_cast<std::size_t>(exclude_id)],
                      pat.y[static_cast<std::size_t>(exclude_id)]});
      if (d2 > r_lo * r_lo && d2 <= r_hi * r_hi) --n;
    }
    return n;
  };
  omega_marked_point(pos, tau, spec, index, exclude_id, ne_of, out);
}

// Spec-level entry point: `pattern` must not contain the marked point.
std::vector<double> omega(const Point& pos, int tau,
                          const MultiTypePattern& pattern,
                          const ModelSpec& spec);

// log lambda_theta((pos,tau); pattern) = z(pos)^T alpha_tau + beta^T omega.
double log_conditional_intensity(const Point& pos, int tau,
                                 const MultiTypePattern& pattern,
                                 const ModelSpec& spec,
                                 const GroupLayout& layout,
                                 std::span<const double> theta,
                                 const std::vector<CovariateField>& covariates);

}  // namespace mgibbs
