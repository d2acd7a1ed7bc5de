#include "mgibbs/cross_k.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mgibbs/parallel.hpp"
#include "mgibbs/spatial_index.hpp"

namespace mgibbs {

std::vector<double> cross_k(const MultiTypePattern& pattern, int type_i,
                            int type_j, const std::vector<double>& r_grid) {
  if (r_grid.empty()) throw std::invalid_argument("empty range grid");
  for (std::size_t k = 1; k < r_grid.size(); ++k) {
    if (!(r_grid[k] > r_grid[k - 1])) {
      throw std::invalid_argument("range grid must be increasing");
    }
  }
  const Window& w = pattern.window;
  const double r_max = r_grid.back();
  if (!(r_max < 0.5 * std::min(w.width(), w.height()))) {
    throw std::invalid_argument(
        "r_max must be below half the shorter window side");
  }
  std::vector<std::size_t> sources;
  std::size_t nj = 0;
  for (std::size_t idx = 0; idx < pattern.size(); ++idx) {
    if (pattern.type[idx] == type_i) sources.push_back(idx);
    if (pattern.type[idx] == type_j) ++nj;
  }
  if (sources.empty() || nj == 0) {
    throw std::invalid_argument("cross_k: empty type");
  }
  const double ni = static_cast<double>(sources.size());
  const double denom = type_i == type_j ? ni * (ni - 1.0) : ni * static_cast<double>(nj);
  if (denom <= 0.0) throw std::invalid_argument("cross_k: not enough points");

  const SpatialIndex index(pattern, r_max);
  const std::size_t bins = r_grid.size();
  using Acc = std::vector<double>;
  Acc binned = det_reduce<Acc>(
      sources.size(), Acc(bins, 0.0),
      [&](std::size_t s, Acc& acc) {
        const std::size_t a = sources[s];
        const Point pa{pattern.x[a], pattern.y[a]};
        index.for_each_in_disc(
            pa, type_j, r_max, static_cast<std::int64_t>(a), [&](std::size_t b) {
              const double dx = pattern.x[a] - pattern.x[b];
              const double dy = pattern.y[a] - pattern.y[b];
              const double d = std::sqrt(dx * dx + dy * dy);
              const std::size_t bin = static_cast<std::size_t>(
                  std::lower_bound(r_grid.begin(), r_grid.end(), d) -
                  r_grid.begin());
              if (bin >= bins) return;
              const double overlap =
                  (w.width() - std::abs(dx)) * (w.height() - std::abs(dy));
              acc[bin] += w.area() / overlap;
            });
      },
      [](Acc& x, Acc& y) {
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += y[k];
      });
  // Cumulative sums and normalization.
  std::vector<double> curve(bins, 0.0);
  double run = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    run += binned[k];
    curve[k] = run * w.area() / denom;
  }
  return curve;
}

void transform_sqrt(CurveSet& curves) {
  auto apply = [](std::vector<double>& c) {
    for (double& v : c) v = std::sqrt(std::max(v, 0.0) / std::numbers::pi);
  };
  apply(curves.data);
  for (auto& c : curves.nulls) apply(c);
  curves.transformed = true;
}

}  // namespace mgibbs
