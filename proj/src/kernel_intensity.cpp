#include "mgibbs/kernel_intensity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mgibbs/spatial_index.hpp"

namespace mgibbs {

CovariateField kernel_intensity(const MultiTypePattern& pattern, int type,
                                double bandwidth, double cell) {
  if (!(bandwidth > 0.0) || !(cell > 0.0)) {
    throw std::invalid_argument("bandwidth and cell size must be positive");
  }
  CovariateField field = CovariateField::over_window(pattern.window, cell);
  field.name = "kernel_intensity";

  std::vector<Point> pts;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (type == 0 || pattern.type[i] == type) {
      pts.push_back(Point{pattern.x[i], pattern.y[i]});
    }
  }
  if (pts.empty()) return field;

  const double h2 = bandwidth * bandwidth;
  const double norm = 2.0 / (std::numbers::pi * h2);
  auto kernel = [&](double dx, double dy) {
    const double q = 1.0 - (dx * dx + dy * dy) / h2;
    return q > 0.0 ? norm * q : 0.0;
  };

  // c_W(x) by the midpoint rule on the raster; reach in whole cells.
  const double cell_area = field.cell_area();
  const int reach_x = static_cast<int>(bandwidth / field.dx) + 1;
  const int reach_y = static_cast<int>(bandwidth / field.dy) + 1;
  std::vector<double> c_w(pts.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pts.size()); ++i) {
    const Point& pt = pts[static_cast<std::size_t>(i)];
    const int cx = static_cast<int>((pt.x - field.x0) / field.dx);
    const int cy = static_cast<int>((pt.y - field.y0) / field.dy);
    double mass = 0.0;
    for (int iy = cy - reach_y; iy <= cy + reach_y; ++iy) {
      if (iy < 0 || iy >= field.ny) continue;
      for (int ix = cx - reach_x; ix <= cx + reach_x; ++ix) {
        if (ix < 0 || ix >= field.nx) continue;
        const Point c = field.cell_center(ix, iy);
        mass += kernel(c.x - pt.x, c.y - pt.y);
      }
    }
    c_w[static_cast<std::size_t>(i)] = mass * cell_area;
  }

  // Gather per cell through a grid index; visit order per cell is fixed, so
  // the field does not depend on the thread count.
  MultiTypePattern sub(pattern.window, 1);
  for (const Point& pt : pts) sub.add(pt.x, pt.y, 1);
  const SpatialIndex index(sub, bandwidth);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0;
       idx < static_cast<std::ptrdiff_t>(field.cell_count()); ++idx) {
    const int ix = static_cast<int>(idx) % field.nx;
    const int iy = static_cast<int>(idx) / field.nx;
    const Point c = field.cell_center(ix, iy);
    double v = 0.0;
    index.for_each_in_disc(c, 1, bandwidth, -1, [&](std::size_t i) {
      const double k = kernel(c.x - pts[i].x, c.y - pts[i].y);
      if (k > 0.0 && c_w[i] > 0.0) v += k / c_w[i];
    });
    field.values[static_cast<std::size_t>(idx)] = v;
  }
  return field;
}

}  // namespace mgibbs
