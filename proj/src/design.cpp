#include "mgibbs/design.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mgibbs/parallel.hpp"
#include "mgibbs/spatial_index.hpp"

namespace mgibbs {

namespace {

std::vector<std::vector<int>> build_supports(const ModelSpec& spec,
                                             const GroupLayout& layout) {
  std::vector<std::vector<int>> support(static_cast<std::size_t>(spec.p) + 1);
  for (int tau = 1; tau <= spec.p; ++tau) {
    auto& cols = support[static_cast<std::size_t>(tau)];
    auto push_group = [&](int g) {
      const GroupInfo& gi = layout.groups[static_cast<std::size_t>(g)];
      for (int k = 0; k < gi.size; ++k) cols.push_back(gi.offset + k);
    };
    push_group(layout.alpha_group(tau));
    push_group(layout.intra_group(tau));
    for (int j = 1; j <= spec.p; ++j) {
      if (j != tau) push_group(layout.inter_group(tau, j));
    }
  }
  return support;
}

}  // namespace

DesignData build_design(const MultiTypePattern& data, const DummySet& dummies,
                        const ModelSpec& spec,
                        const std::vector<CovariateField>& covariates,
                        double r_bor) {
  spec.validate();
  if (static_cast<int>(covariates.size()) != spec.covariate_count) {
    throw std::invalid_argument("covariate count does not match the spec");
  }
  if (r_bor < spec.max_range()) {
    throw std::invalid_argument(
        "border range must be at least the maximal interaction range");
  }
  if (dummies.points.p != data.p) {
    throw std::invalid_argument("dummy and data type counts differ");
  }

  DesignData d;
  d.layout = GroupLayout::from_spec(spec);
  d.p = spec.p;
  d.window = data.window;
  d.eroded = r_bor > 0.0 ? data.window.eroded(r_bor) : data.window;
  d.r_bor = r_bor;
  d.rho = dummies.rho;
  d.support = build_supports(spec, d.layout);

  const double reach = std::max(spec.max_range(), 1e-12);
  const SpatialIndex index(data, reach);

  // Neighbour counts ne_k(y, type) for every data point, used for the
  // neighbours-of-neighbours terms: stride p * k_max per point.
  int k_max = 0;
  for (int i = 1; i <= spec.p; ++i) {
    for (int j = i; j <= spec.p; ++j) {
      k_max = std::max(k_max, spec.steps(i, j));
    }
  }
  const std::size_t stride = static_cast<std::size_t>(spec.p) *
                             static_cast<std::size_t>(std::max(k_max, 1));
  std::vector<int> table(data.size() * stride, 0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t yi = 0; yi < static_cast<std::ptrdiff_t>(data.size());
       ++yi) {
    const std::size_t y = static_cast<std::size_t>(yi);
    const Point pos{data.x[y], data.y[y]};
    for (int j = 1; j <= spec.p; ++j) {
      const auto& ranges = spec.pair_ranges(data.type[y], j);
      double r_lo = 0.0;
      for (std::size_t k = 0; k < ranges.size(); ++k) {
        table[y * stride + static_cast<std::size_t>(j - 1) *
                               static_cast<std::size_t>(std::max(k_max, 1)) +
              k] = index.count_annulus(pos, j, r_lo, ranges[k],
                                       static_cast<std::int64_t>(y));
        r_lo = ranges[k];
      }
    }
  }

  // Retained rows: data first (in pattern order), then dummies.
  struct Pending {
    double x, y;
    int type;
    std::int64_t data_id;  // >= 0 when the row is a data point
  };
  std::vector<Pending> rows;
  std::vector<int> retained_data(static_cast<std::size_t>(spec.p) + 1, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (d.eroded.contains(data.x[i], data.y[i])) {
      rows.push_back({data.x[i], data.y[i], data.type[i],
                      static_cast<std::int64_t>(i)});
      retained_data[static_cast<std::size_t>(data.type[i])]++;
    }
  }
  const std::size_t n_data_rows = rows.size();
  for (std::size_t i = 0; i < dummies.points.size(); ++i) {
    if (d.eroded.contains(dummies.points.x[i], dummies.points.y[i])) {
      rows.push_back({dummies.points.x[i], dummies.points.y[i],
                      dummies.points.type[i], -1});
    }
  }
  for (int t = 1; t <= spec.p; ++t) {
    if (retained_data[static_cast<std::size_t>(t)] == 0) {
      d.warnings.push_back("type " + std::to_string(t) +
                           " has no retained data rows");
    }
  }

  const std::size_t n_rows = rows.size();
  d.is_data.resize(n_rows);
  d.row_type.resize(n_rows);
  d.row_x.resize(n_rows);
  d.row_y.resize(n_rows);
  d.offset.resize(n_rows);
  d.fold.assign(n_rows, -1);
  d.row_ptr.resize(n_rows + 1);
  d.row_ptr[0] = 0;
  for (std::size_t r = 0; r < n_rows; ++r) {
    d.row_ptr[r + 1] =
        d.row_ptr[r] +
        d.support[static_cast<std::size_t>(rows[r].type)].size();
  }
  d.values.assign(d.row_ptr[n_rows], 0.0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ri = 0; ri < static_cast<std::ptrdiff_t>(n_rows); ++ri) {
    const std::size_t r = static_cast<std::size_t>(ri);
    const Pending& row = rows[r];
    d.is_data[r] = r < n_data_rows ? 1 : 0;
    d.row_type[r] = row.type;
    d.row_x[r] = row.x;
    d.row_y[r] = row.y;
    d.offset[r] = -std::log(d.rho[static_cast<std::size_t>(row.type)]);
    double* slab = d.values.data() + d.row_ptr[r];
    slab[0] = 1.0;
    for (int c = 0; c < spec.covariate_count; ++c) {
      slab[1 + c] =
          covariates[static_cast<std::size_t>(c)].value_at(row.x, row.y);
    }
    const Point pos{row.x, row.y};
    auto ne_of = [&](std::size_t y, int k) {
      int n = table[y * stride +
                    static_cast<std::size_t>(row.type - 1) *
                        static_cast<std::size_t>(std::max(k_max, 1)) +
                    static_cast<std::size_t>(k)];
      // A data row's own point is one of y's step-k neighbours; remove it.
      if (row.data_id >= 0) --n;
      return n;
    };
    std::span<double> interactions(
        slab + 1 + spec.covariate_count,
        static_cast<std::size_t>(interaction_slot_count(spec, row.type)));
    omega_marked_point(pos, row.type, spec, index, row.data_id, ne_of,
                       interactions);
  }
  return d;
}

DesignData DesignData::dense(const GroupLayout& layout,
                             const std::vector<std::vector<double>>& b,
                             const std::vector<std::uint8_t>& t,
                             const std::vector<double>& offsets) {
  DesignData d;
  d.layout = layout;
  d.p = 1;
  d.support.resize(2);
  for (int c = 0; c < layout.dim; ++c) d.support[1].push_back(c);
  const std::size_t n = b.size();
  d.is_data = t;
  d.row_type.assign(n, 1);
  d.row_x.assign(n, 0.0);
  d.row_y.assign(n, 0.0);
  d.offset = offsets;
  d.fold.assign(n, -1);
  d.row_ptr.resize(n + 1);
  d.row_ptr[0] = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (b[r].size() != static_cast<std::size_t>(layout.dim)) {
      throw std::invalid_argument("dense row length mismatch");
    }
    d.row_ptr[r + 1] = d.row_ptr[r] + b[r].size();
    d.values.insert(d.values.end(), b[r].begin(), b[r].end());
  }
  return d;
}

void write_design_csv(const DesignData& design, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,type,x,y,offset";
  for (const auto& g : design.layout.groups) {
    for (int k = 0; k < g.size; ++k) {
      out << "," << g.name;
      if (g.size > 1) out << "_" << (k + 1);
    }
  }
  out << "\n";
  std::vector<double> dense_row(static_cast<std::size_t>(design.layout.dim));
  char buf[32];
  for (std::size_t r = 0; r < design.row_count(); ++r) {
    std::fill(dense_row.begin(), dense_row.end(), 0.0);
    const auto& cols = design.row_support(r);
    const auto vals = design.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      dense_row[static_cast<std::size_t>(cols[k])] = vals[k];
    }
    out << int(design.is_data[r]) << "," << design.row_type[r];
    std::snprintf(buf, sizeof(buf), ",%.12g", design.row_x[r]);
    out << buf;
    std::snprintf(buf, sizeof(buf), ",%.12g", design.row_y[r]);
    out << buf;
    std::snprintf(buf, sizeof(buf), ",%.12g", design.offset[r]);
    out << buf;
    for (double v : dense_row) {
      std::snprintf(buf, sizeof(buf), ",%.12g", v);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace mgibbs
