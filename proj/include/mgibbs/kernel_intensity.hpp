#pragma once

#include "mgibbs/covariate.hpp"
#include "mgibbs/pattern.hpp"

namespace mgibbs {

// Border-corrected Epanechnikov kernel intensity estimate of one type's
// sub-pattern on a raster with the given cell size:
//   eta(u) = sum_x k_h(u - x) / c_W(x),   c_W(x) = integral of k_h over W,
// with k_h(v) = (2 / (pi h^2)) (1 - |v|^2/h^2)_+ and c_W evaluated by the
// midpoint rule on the same raster, which makes the raster sum of eta equal
// the point count exactly. An empty sub-pattern yields the zero field.
CovariateField kernel_intensity(const MultiTypePattern& pattern, int type,
                                double bandwidth, double cell);

}  // namespace mgibbs
