#include "mgibbs/covariate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgibbs {

CovariateField CovariateField::over_window(const Window& w, double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("cell size must be positive");
  const int nx = std::max(1, static_cast<int>(std::ceil(w.width() / cell)));
  const int ny = std::max(1, static_cast<int>(std::ceil(w.height() / cell)));
  return CovariateField(w.x_min, w.y_min, w.width() / nx, w.height() / ny, nx,
                        ny);
}

double CovariateField::value_at(double x, double y) const {
  int ix = static_cast<int>((x - x0) / dx);
  int iy = static_cast<int>((y - y0) / dy);
  ix = std::clamp(ix, 0, nx - 1);
  iy = std::clamp(iy, 0, ny - 1);
  return at(ix, iy);
}

double CovariateField::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return values.empty() ? 0.0 : s / static_cast<double>(values.size());
}

double CovariateField::stddev() const {
  if (values.size() < 2) return 0.0;
  const double m = mean();
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(values.size()));
}

void CovariateField::standardize() {
  const double m = mean();
  const double sd = stddev();
  if (sd == 0.0) {
    throw std::invalid_argument("cannot standardize a constant raster");
  }
  for (double& v : values) v = (v - m) / sd;
}

}  // namespace mgibbs
