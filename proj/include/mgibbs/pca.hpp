#pragma once

#include <string>
#include <vector>

#include "mgibbs/covariate.hpp"

namespace mgibbs {

struct PcaResult {
  std::vector<CovariateField> components;  // score maps U * S, variance order
  std::vector<double> singular_values;
  std::vector<double> cumulative_variance;  // fraction captured by 1..k
  std::vector<std::string> dropped;         // constant rasters
};

// Standardize each raster over its cells, then return the first k principal
// component score maps of the cells x rasters matrix with the cumulative
// variance fractions. Constant rasters are dropped with a note (they carry no
// variance and would break standardization).
PcaResult pca_covariates(const std::vector<CovariateField>& rasters, int k);

}  // namespace mgibbs
