#pragma once

#include <string>
#include <vector>

#include "mgibbs/geometry.hpp"

namespace mgibbs {

// Raster covariate over the window, nearest-cell lookup (no interpolation;
// matches coarse gridded field data). Cell (ix, iy) covers
// [x0 + ix*dx, x0 + (ix+1)*dx) x [y0 + iy*dy, y0 + (iy+1)*dy),
// values stored row-major with iy varying slowest.
struct CovariateField {
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 1.0;
  double dy = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;
  std::string name;

  CovariateField() = default;
  CovariateField(double x0_, double y0_, double dx_, double dy_, int nx_,
                 int ny_)
      : x0(x0_), y0(y0_), dx(dx_), dy(dy_), nx(nx_), ny(ny_),
        values(static_cast<std::size_t>(nx_) * ny_, 0.0) {}

  // Raster covering `w` with the given cell size.
  static CovariateField over_window(const Window& w, double cell);

  double& at(int ix, int iy) {
    return values[static_cast<std::size_t>(iy) * nx + ix];
  }
  double at(int ix, int iy) const {
    return values[static_cast<std::size_t>(iy) * nx + ix];
  }

  Point cell_center(int ix, int iy) const {
    return Point{x0 + (ix + 0.5) * dx, y0 + (iy + 0.5) * dy};
  }

  double value_at(double x, double y) const;

  double cell_area() const { return dx * dy; }
  std::size_t cell_count() const { return values.size(); }

  double mean() const;
  double stddev() const;
  // In-place standardization to mean 0, sd 1 over cells.
  void standardize();
};

}  // namespace mgibbs
