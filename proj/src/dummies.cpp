#include "mgibbs/dummies.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mgibbs {

DummySet generate_dummies(const Window& window,
                          const std::vector<int>& counts_by_type,
                          const DummySpec& spec, RngStream rng) {
  if (!(spec.intensity_factor > 0.0) || spec.min_per_type < 1) {
    throw std::invalid_argument("invalid dummy spec");
  }
  const int p = static_cast<int>(counts_by_type.size()) - 1;
  if (p < 1) throw std::invalid_argument("counts_by_type must have size p+1");

  DummySet out;
  out.points = MultiTypePattern(window, p);
  out.rho.assign(static_cast<std::size_t>(p) + 1, 0.0);
  const double aspect = window.width() / window.height();

  for (int t = 1; t <= p; ++t) {
    const int n = counts_by_type[static_cast<std::size_t>(t)];
    if (n < 0) throw std::invalid_argument("negative type count");
    const int m = std::max(
        static_cast<int>(std::ceil(spec.intensity_factor * n)),
        spec.min_per_type);
    out.rho[static_cast<std::size_t>(t)] = m / window.area();

    // Aspect-balanced tiling with at least m cells; a random subset of m
    // cells receives one uniform point each.
    const int cx = static_cast<int>(std::ceil(std::sqrt(m * aspect)));
    const int cy = static_cast<int>(std::ceil(std::sqrt(m / aspect)));
    const double wx = window.width() / cx;
    const double wy = window.height() / cy;
    std::vector<int> cells(static_cast<std::size_t>(cx) * cy);
    std::iota(cells.begin(), cells.end(), 0);
    RngStream stream = rng.substream(static_cast<std::uint64_t>(t));
    stream.shuffle(cells);
    for (int i = 0; i < m; ++i) {
      const int cell = cells[static_cast<std::size_t>(i)];
      const int gx = cell % cx;
      const int gy = cell / cx;
      out.points.add(window.x_min + (gx + stream.uniform()) * wx,
                     window.y_min + (gy + stream.uniform()) * wy, t);
    }
  }
  return out;
}

}  // namespace mgibbs
