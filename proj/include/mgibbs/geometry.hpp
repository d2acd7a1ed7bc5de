#pragma once

#include <stdexcept>

namespace mgibbs {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Axis-aligned rectangular observation window.
struct Window {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  Window() = default;
  Window(double x0, double x1, double y0, double y1);

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  bool contains(const Point& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  bool contains(double x, double y) const { return contains(Point{x, y}); }

  // Minkowski erosion by a disc of radius r_bor, clipped to the axis-aligned
  // form [x_min+r, x_max-r] x [y_min+r, y_max-r].
  Window eroded(double r_bor) const;

  // Dilation by r on every side (used for simulating cluster parents whose
  // offspring may fall back inside the window).
  Window dilated(double r) const;
};

class degenerate_window_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mgibbs
