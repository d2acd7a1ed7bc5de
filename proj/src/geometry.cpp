#include "mgibbs/geometry.hpp"

#include <string>

namespace mgibbs {

Window::Window(double x0, double x1, double y0, double y1)
    : x_min(x0), x_max(x1), y_min(y0), y_max(y1) {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw degenerate_window_error("window sides must have positive length");
  }
}

Window Window::eroded(double r_bor) const {
  if (r_bor < 0.0) {
    throw std::invalid_argument("erosion radius must be non-negative");
  }
  const double x0 = x_min + r_bor;
  const double x1 = x_max - r_bor;
  const double y0 = y_min + r_bor;
  const double y1 = y_max - r_bor;
  if (!(x0 < x1) || !(y0 < y1)) {
    throw degenerate_window_error("erosion by " + std::to_string(r_bor) +
                                  " collapses the window");
  }
  return Window(x0, x1, y0, y1);
}

Window Window::dilated(double r) const {
  if (r < 0.0) {
    throw std::invalid_argument("dilation radius must be non-negative");
  }
  return Window(x_min - r, x_max + r, y_min - r, y_max + r);
}

}  // namespace mgibbs
