#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mgibbs/covariate.hpp"
#include "mgibbs/dummies.hpp"
#include "mgibbs/model.hpp"
#include "mgibbs/omega.hpp"

namespace mgibbs {

// The logistic-regression form of the pseudo-likelihood: one row per data or
// dummy point retained after border erosion, response t(u) = 1 for data,
// statistic vector b(u) = v(u; x) and offset -log rho_type(u).
//
// Rows are stored group-sparse: a row of class (type) tau carries values only
// for the columns in support[tau] (its covariate block and the pair groups
// involving tau); all other entries are structurally zero. Two invariants the
// construction relies on: the conditioning pattern is always the full data
// (dummies never act as neighbours), and border filtering drops rows, not
// points, so filtered-out data still contribute as neighbours.
struct DesignData {
  GroupLayout layout;
  int p = 0;
  Window window;
  Window eroded;
  double r_bor = 0.0;
  std::vector<double> rho;  // per type, index 0 unused

  // Column support (ascending flat indices) per row class 1..p.
  std::vector<std::vector<int>> support;

  std::vector<std::uint8_t> is_data;
  std::vector<int> row_type;
  std::vector<double> row_x;
  std::vector<double> row_y;
  std::vector<double> offset;
  std::vector<int> fold;  // -1 until a CV partition assigns quadrats
  std::vector<double> values;
  std::vector<std::size_t> row_ptr;

  std::vector<std::string> warnings;

  std::size_t row_count() const { return is_data.size(); }
  std::span<const double> row_values(std::size_t r) const {
    return {values.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }
  const std::vector<int>& row_support(std::size_t r) const {
    return support[static_cast<std::size_t>(row_type[r])];
  }

  // theta^T b(u) for row r (offset not included).
  double linear_value(std::size_t r, std::span<const double> theta) const {
    const auto& cols = row_support(r);
    const std::span<const double> vals = row_values(r);
    double s = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      s += theta[static_cast<std::size_t>(cols[k])] * vals[k];
    }
    return s;
  }

  // Dense single-class design for solver tests: one row class holding every
  // column.
  static DesignData dense(const GroupLayout& layout,
                          const std::vector<std::vector<double>>& b,
                          const std::vector<std::uint8_t>& t,
                          const std::vector<double>& offsets);
};

// Assemble the design from data and dummies. Requires r_bor >= the maximal
// interaction range of the spec; throws degenerate_window_error if erosion
// collapses the window.
DesignData build_design(const MultiTypePattern& data, const DummySet& dummies,
                        const ModelSpec& spec,
                        const std::vector<CovariateField>& covariates,
                        double r_bor);

// Wide-format CSV export (t, type, x, y, offset, then one named column per
// coefficient) for external cross-checks.
void write_design_csv(const DesignData& design, const std::string& path);

}  // namespace mgibbs
