#include "mgibbs/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgibbs::reference {

int count_annulus(const MultiTypePattern& pattern, const Point& center,
                  int target_type, double r_lo, double r_hi,
                  std::int64_t exclude_id) {
  if (r_lo < 0.0 || !(r_lo < r_hi)) {
    throw std::invalid_argument("annulus radii must satisfy 0 <= r_lo < r_hi");
  }
  const double lo2 = r_lo * r_lo;
  const double hi2 = r_hi * r_hi;
  int count = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (static_cast<std::int64_t>(i) == exclude_id) continue;
    if (target_type != 0 && pattern.type[i] != target_type) continue;
    const double d2 =
        squared_distance(center, Point{pattern.x[i], pattern.y[i]});
    if (d2 > lo2 && d2 <= hi2) ++count;
  }
  return count;
}

namespace {

// Saturated neighbour count of pattern point `idx` for `target_type` in
// step k of the pair {type(idx), target_type}.
double g_value(const MultiTypePattern& pat, const ModelSpec& spec,
               std::size_t idx, int target_type, int k) {
  const int own = pat.type[idx];
  const auto& ranges = spec.pair_ranges(own, target_type);
  const double r_lo = k == 0 ? 0.0 : ranges[static_cast<std::size_t>(k - 1)];
  const double r_hi = ranges[static_cast<std::size_t>(k)];
  const int ne = count_annulus(pat, Point{pat.x[idx], pat.y[idx]}, target_type,
                               r_lo, r_hi, static_cast<std::int64_t>(idx));
  if (spec.family == InteractionFamily::strauss) return ne;
  const int c =
      spec.ordered_saturations(own, target_type)[static_cast<std::size_t>(k)];
  return std::min(ne, c);
}

}  // namespace

std::vector<double> sufficient_statistics(
    const MultiTypePattern& pattern, const ModelSpec& spec,
    const GroupLayout& layout, const std::vector<CovariateField>& covariates) {
  std::vector<double> v(static_cast<std::size_t>(layout.dim), 0.0);
  for (std::size_t idx = 0; idx < pattern.size(); ++idx) {
    const int i = pattern.type[idx];
    const GroupInfo& alpha =
        layout.groups[static_cast<std::size_t>(layout.alpha_group(i))];
    v[static_cast<std::size_t>(alpha.offset)] += 1.0;
    for (int c = 0; c < spec.covariate_count; ++c) {
      v[static_cast<std::size_t>(alpha.offset + 1 + c)] +=
          covariates[static_cast<std::size_t>(c)].value_at(pattern.x[idx],
                                                           pattern.y[idx]);
    }
    for (int j = 1; j <= spec.p; ++j) {
      const GroupInfo& g =
          layout.groups[static_cast<std::size_t>(layout.pair_group(i, j))];
      for (int k = 0; k < spec.steps(i, j); ++k) {
        v[static_cast<std::size_t>(g.offset + k)] +=
            g_value(pattern, spec, idx, j, k);
      }
    }
  }
  return v;
}

double log_unnormalized_density(const MultiTypePattern& pattern,
                                const ModelSpec& spec,
                                const GroupLayout& layout,
                                std::span<const double> theta,
                                const std::vector<CovariateField>& covariates) {
  const std::vector<double> v =
      sufficient_statistics(pattern, spec, layout, covariates);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += theta[i] * v[i];
  return s;
}

std::vector<double> statistic_difference(
    const Point& pos, int tau, const MultiTypePattern& pattern,
    const ModelSpec& spec, const GroupLayout& layout,
    const std::vector<CovariateField>& covariates) {
  MultiTypePattern with = pattern;
  with.add(pos.x, pos.y, tau);
  std::vector<double> v1 =
      sufficient_statistics(with, spec, layout, covariates);
  const std::vector<double> v0 =
      sufficient_statistics(pattern, spec, layout, covariates);
  for (std::size_t i = 0; i < v1.size(); ++i) v1[i] -= v0[i];
  return v1;
}

std::vector<double> cross_k(const MultiTypePattern& pattern, int type_i,
                            int type_j, const std::vector<double>& r_grid) {
  const Window& w = pattern.window;
  std::vector<std::size_t> pi, pj;
  for (std::size_t idx = 0; idx < pattern.size(); ++idx) {
    if (pattern.type[idx] == type_i) pi.push_back(idx);
    if (pattern.type[idx] == type_j) pj.push_back(idx);
  }
  const double ni = static_cast<double>(pi.size());
  const double nj = static_cast<double>(pj.size());
  if (pi.empty() || pj.empty()) {
    throw std::invalid_argument("cross_k: empty type");
  }
  const double denom =
      type_i == type_j ? ni * (ni - 1.0) : ni * nj;
  std::vector<double> curve(r_grid.size(), 0.0);
  for (std::size_t a : pi) {
    for (std::size_t b : pj) {
      if (a == b) continue;
      const double dx = pattern.x[a] - pattern.x[b];
      const double dy = pattern.y[a] - pattern.y[b];
      const double d = std::sqrt(dx * dx + dy * dy);
      const double overlap =
          (w.width() - std::abs(dx)) * (w.height() - std::abs(dy));
      const double weight = w.area() / overlap;
      for (std::size_t r = 0; r < r_grid.size(); ++r) {
        if (d <= r_grid[r]) curve[r] += weight;
      }
    }
  }
  for (double& v : curve) v *= w.area() / denom;
  return curve;
}

}  // namespace mgibbs::reference
