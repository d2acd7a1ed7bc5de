#include "mgibbs/omega.hpp"

#include <algorithm>
#include <stdexcept>

namespace mgibbs {

int interaction_slot_count(const ModelSpec& spec, int tau) {
  int n = spec.steps(tau, tau);
  for (int j = 1; j <= spec.p; ++j) {
    if (j != tau) n += spec.steps(tau, j);
  }
  return n;
}

std::vector<double> omega(const Point& pos, int tau,
                          const MultiTypePattern& pattern,
                          const ModelSpec& spec) {
  if (!pattern.window.contains(pos)) {
    throw std::invalid_argument("omega: marked point lies outside the window");
  }
  std::vector<double> out(
      static_cast<std::size_t>(interaction_slot_count(spec, tau)), 0.0);
  const double reach = spec.max_range();
  if (reach <= 0.0 || pattern.size() == 0) return out;
  SpatialIndex index(pattern, reach);
  omega_with_queries(pos, tau, spec, index, -1, out);
  return out;
}

double log_conditional_intensity(const Point& pos, int tau,
                                 const MultiTypePattern& pattern,
                                 const ModelSpec& spec,
                                 const GroupLayout& layout,
                                 std::span<const double> theta,
                                 const std::vector<CovariateField>& covariates) {
  if (static_cast<int>(covariates.size()) != spec.covariate_count) {
    throw std::invalid_argument("covariate count does not match the spec");
  }
  const std::vector<double> w = omega(pos, tau, pattern, spec);
  const GroupInfo& alpha = layout.groups[static_cast<std::size_t>(
      layout.alpha_group(tau))];
  double lp = theta[static_cast<std::size_t>(alpha.offset)];  // intercept
  for (int c = 0; c < spec.covariate_count; ++c) {
    lp += theta[static_cast<std::size_t>(alpha.offset + 1 + c)] *
          covariates[static_cast<std::size_t>(c)].value_at(pos.x, pos.y);
  }
  std::size_t slot = 0;
  auto add_group = [&](int g) {
    const GroupInfo& gi = layout.groups[static_cast<std::size_t>(g)];
    for (int k = 0; k < gi.size; ++k) {
      lp += theta[static_cast<std::size_t>(gi.offset + k)] * w[slot++];
    }
  };
  add_group(layout.intra_group(tau));
  for (int j = 1; j <= spec.p; ++j) {
    if (j != tau) add_group(layout.inter_group(tau, j));
  }
  return lp;
}

}  // namespace mgibbs
