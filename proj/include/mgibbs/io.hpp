#pragma once

#include <string>
#include <vector>

#include "mgibbs/covariate.hpp"
#include "mgibbs/group_lasso.hpp"
#include "mgibbs/pattern.hpp"

namespace mgibbs {

// Point-pattern CSV: header "x,y,type"; type is a 1-based integer or a string
// label (labels map to indices in first-appearance order). `labels` carries
// the mapping; purely numeric files get labels "1".."p".
struct PatternFile {
  MultiTypePattern pattern;
  std::vector<std::string> labels;  // index 0 unused
};

PatternFile read_pattern_csv(const std::string& path, const Window& window);
void write_pattern_csv(const MultiTypePattern& pattern,
                       const std::vector<std::string>& labels,
                       const std::string& path);

// Raster file: header "nx ny x0 y0 dx dy", then nx*ny row-major values
// (iy slowest, bottom row first).
CovariateField read_raster(const std::string& path);
void write_raster(const CovariateField& field, const std::string& path);

// p x p integer matrix as CSV and as a P2 portable graymap (0 = black =
// absent, 255 = white = present).
void write_matrix_csv(const std::vector<int>& matrix, int p,
                      const std::string& path);
void write_matrix_csv(const std::vector<double>& matrix, int p,
                      const std::string& path);
void write_matrix_pgm(const std::vector<int>& matrix, int p,
                      const std::string& path);

double parse_double(const std::string& s);
std::vector<std::string> split(const std::string& line, char sep);
std::string format_double(double v);

}  // namespace mgibbs
