#include "mgibbs/pattern.hpp"

#include <stdexcept>
#include <string>

namespace mgibbs {

void MultiTypePattern::add(double px, double py, int t) {
  if (t < 1 || t > p) {
    throw std::invalid_argument("type label " + std::to_string(t) +
                                " outside 1.." + std::to_string(p));
  }
  x.push_back(px);
  y.push_back(py);
  type.push_back(t);
}

std::vector<int> MultiTypePattern::counts_by_type() const {
  std::vector<int> n(static_cast<std::size_t>(p) + 1, 0);
  for (int t : type) n[static_cast<std::size_t>(t)]++;
  return n;
}

MultiTypePattern MultiTypePattern::subset_in_region(const Window& region) const {
  MultiTypePattern out(window, p);
  for (std::size_t i = 0; i < size(); ++i) {
    if (region.contains(x[i], y[i])) out.add(x[i], y[i], type[i]);
  }
  return out;
}

void MultiTypePattern::validate() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (!window.contains(x[i], y[i])) {
      throw std::invalid_argument("point " + std::to_string(i) +
                                  " lies outside the window");
    }
    if (type[i] < 1 || type[i] > p) {
      throw std::invalid_argument("point " + std::to_string(i) +
                                  " has type label outside 1..p");
    }
  }
}

}  // namespace mgibbs
