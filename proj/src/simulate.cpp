#include "mgibbs/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mgibbs/omega.hpp"

namespace mgibbs {

MultiTypePattern sim_binomial(const Window& window,
                              const std::vector<int>& counts_by_type,
                              RngStream rng) {
  const int p = static_cast<int>(counts_by_type.size()) - 1;
  MultiTypePattern out(window, p);
  for (int t = 1; t <= p; ++t) {
    for (int i = 0; i < counts_by_type[static_cast<std::size_t>(t)]; ++i) {
      out.add(rng.uniform(window.x_min, window.x_max),
              rng.uniform(window.y_min, window.y_max), t);
    }
  }
  return out;
}

MultiTypePattern sim_poisson(const Window& window, double lambda,
                             RngStream rng) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const int n = rng.poisson(lambda * window.area());
  return sim_binomial(window, {0, n}, rng.substream(1));
}

MultiTypePattern sim_ipp(const Window& window, const CovariateField& field,
                         int n, RngStream rng) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  double fmax = 0.0;
  for (double v : field.values) {
    if (v < 0.0) throw std::invalid_argument("intensity field must be >= 0");
    fmax = std::max(fmax, v);
  }
  if (fmax == 0.0 && n > 0) {
    throw std::invalid_argument("intensity field is identically zero");
  }
  MultiTypePattern out(window, 1);
  int accepted = 0;
  while (accepted < n) {
    const double x = rng.uniform(window.x_min, window.x_max);
    const double y = rng.uniform(window.y_min, window.y_max);
    if (rng.uniform() * fmax <= field.value_at(x, y)) {
      out.add(x, y, 1);
      ++accepted;
    }
  }
  return out;
}

MultiTypePattern sim_thomas(const Window& window, const ThomasSpec& spec,
                            RngStream rng) {
  if (!(spec.mu > 0.0) || !(spec.sigma > 0.0)) {
    throw std::invalid_argument("thomas: mu and sigma must be positive");
  }
  if (spec.parent_count <= 0 && !(spec.kappa > 0.0)) {
    throw std::invalid_argument("thomas: need kappa or parent_count");
  }
  // 4 sigma covers all but a negligible sliver of offspring mass from
  // parents outside the window.
  const Window dilated = window.dilated(4.0 * spec.sigma);
  const int n_parents = spec.parent_count > 0
                            ? spec.parent_count
                            : rng.poisson(spec.kappa * dilated.area());
  std::vector<Point> parents;
  parents.reserve(static_cast<std::size_t>(n_parents));
  if (spec.parent_field) {
    double fmax = 0.0;
    for (double v : spec.parent_field->values) {
      if (v < 0.0) throw std::invalid_argument("parent field must be >= 0");
      fmax = std::max(fmax, v);
    }
    if (fmax == 0.0) {
      throw std::invalid_argument("parent field is identically zero");
    }
    while (parents.size() < static_cast<std::size_t>(n_parents)) {
      const double x = rng.uniform(dilated.x_min, dilated.x_max);
      const double y = rng.uniform(dilated.y_min, dilated.y_max);
      if (rng.uniform() * fmax <= spec.parent_field->value_at(x, y)) {
        parents.push_back(Point{x, y});
      }
    }
  } else {
    for (int i = 0; i < n_parents; ++i) {
      parents.push_back(Point{rng.uniform(dilated.x_min, dilated.x_max),
                              rng.uniform(dilated.y_min, dilated.y_max)});
    }
  }
  MultiTypePattern out(window, 1);
  for (const Point& parent : parents) {
    const int n_off = rng.poisson(spec.mu);
    for (int i = 0; i < n_off; ++i) {
      const double x = parent.x + spec.sigma * rng.normal();
      const double y = parent.y + spec.sigma * rng.normal();
      if (window.contains(x, y)) out.add(x, y, 1);
    }
  }
  return out;
}

namespace {

// Grid index over a pattern whose points relocate; shares the query
// interface of SpatialIndex so the omega machinery works on chain states.
class MutableGrid {
 public:
  MutableGrid(MultiTypePattern& pattern, double cell_side)
      : pattern_(&pattern) {
    const Window& w = pattern.window;
    const double max_side = std::max(w.width(), w.height());
    cell_side_ = std::clamp(cell_side, max_side / 512.0, max_side);
    nx_ = std::max(1, static_cast<int>(std::ceil(w.width() / cell_side_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(w.height() / cell_side_)));
    cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    cell_of_point_.resize(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const std::size_t c = cell_at(pattern.x[i], pattern.y[i]);
      cells_[c].push_back(static_cast<std::int64_t>(i));
      cell_of_point_[i] = c;
    }
  }

  const MultiTypePattern& pattern() const { return *pattern_; }

  void move(std::size_t id, const Point& to) {
    auto& old_cell = cells_[cell_of_point_[id]];
    old_cell.erase(std::find(old_cell.begin(), old_cell.end(),
                             static_cast<std::int64_t>(id)));
    pattern_->x[id] = to.x;
    pattern_->y[id] = to.y;
    const std::size_t c = cell_at(to.x, to.y);
    cells_[c].push_back(static_cast<std::int64_t>(id));
    cell_of_point_[id] = c;
  }

  int count_annulus(const Point& center, int target_type, double r_lo,
                    double r_hi, std::int64_t exclude_id = -1) const {
    const double lo2 = r_lo * r_lo;
    const double hi2 = r_hi * r_hi;
    int count = 0;
    visit_cells(center, r_hi, [&](std::size_t cell) {
      for (std::int64_t id : cells_[cell]) {
        if (id == exclude_id) continue;
        const std::size_t i = static_cast<std::size_t>(id);
        if (target_type != 0 && pattern_->type[i] != target_type) continue;
        const double dx = pattern_->x[i] - center.x;
        const double dy = pattern_->y[i] - center.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 > lo2 && d2 <= hi2) ++count;
      }
    });
    return count;
  }

  template <class Fn>
  void for_each_in_disc(const Point& center, int target_type, double r_hi,
                        std::int64_t exclude_id, Fn&& fn) const {
    const double r2 = r_hi * r_hi;
    visit_cells(center, r_hi, [&](std::size_t cell) {
      for (std::int64_t id : cells_[cell]) {
        if (id == exclude_id) continue;
        const std::size_t i = static_cast<std::size_t>(id);
        if (target_type != 0 && pattern_->type[i] != target_type) continue;
        const double dx = pattern_->x[i] - center.x;
        const double dy = pattern_->y[i] - center.y;
        if (dx * dx + dy * dy <= r2) fn(i);
      }
    });
  }

 private:
  template <class Fn>
  void visit_cells(const Point& center, double radius, Fn&& fn) const {
    const int reach = static_cast<int>(radius / cell_side_) + 1;
    const int cx = std::clamp(
        static_cast<int>((center.x - pattern_->window.x_min) / cell_side_), 0,
        nx_ - 1);
    const int cy = std::clamp(
        static_cast<int>((center.y - pattern_->window.y_min) / cell_side_), 0,
        ny_ - 1);
    for (int gy = cy - reach; gy <= cy + reach; ++gy) {
      if (gy < 0 || gy >= ny_) continue;
      for (int gx = cx - reach; gx <= cx + reach; ++gx) {
        if (gx < 0 || gx >= nx_) continue;
        fn(static_cast<std::size_t>(gy) * nx_ + gx);
      }
    }
  }

  std::size_t cell_at(double x, double y) const {
    const int cx = std::clamp(
        static_cast<int>((x - pattern_->window.x_min) / cell_side_), 0,
        nx_ - 1);
    const int cy = std::clamp(
        static_cast<int>((y - pattern_->window.y_min) / cell_side_), 0,
        ny_ - 1);
    return static_cast<std::size_t>(cy) * nx_ + cx;
  }

  MultiTypePattern* pattern_;
  double cell_side_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::int64_t>> cells_;
  std::vector<std::size_t> cell_of_point_;
};

}  // namespace

MultiTypePattern sim_gibbs_fixed_n(
    const ModelSpec& spec, std::span<const double> theta,
    const std::vector<int>& counts_by_type, const Window& window, int sweeps,
    RngStream rng, const std::vector<CovariateField>& covariates,
    GibbsSimDiagnostics* diagnostics) {
  spec.validate();
  if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
  if (static_cast<int>(covariates.size()) != spec.covariate_count) {
    throw std::invalid_argument("covariate count does not match the spec");
  }
  const GroupLayout layout = GroupLayout::from_spec(spec);
  if (theta.size() != static_cast<std::size_t>(layout.dim)) {
    throw std::invalid_argument("theta length does not match the spec");
  }

  MultiTypePattern state = sim_binomial(window, counts_by_type, rng.substream(1));
  RngStream chain = rng.substream(2);
  const std::size_t n = state.size();
  if (n == 0) return state;
  MutableGrid grid(state, std::max(spec.max_range(), 1e-12));

  std::vector<std::vector<double>> slots(static_cast<std::size_t>(spec.p) + 1);
  for (int t = 1; t <= spec.p; ++t) {
    slots[static_cast<std::size_t>(t)].resize(
        static_cast<std::size_t>(interaction_slot_count(spec, t)));
  }

  // log lambda((pos, tau); state \ excluded).
  auto log_lambda = [&](const Point& pos, int tau, std::int64_t excluded) {
    auto& buf = slots[static_cast<std::size_t>(tau)];
    omega_with_queries(pos, tau, spec, grid, excluded, buf);
    const GroupInfo& alpha =
        layout.groups[static_cast<std::size_t>(layout.alpha_group(tau))];
    double lp = theta[static_cast<std::size_t>(alpha.offset)];
    for (int c = 0; c < spec.covariate_count; ++c) {
      lp += theta[static_cast<std::size_t>(alpha.offset + 1 + c)] *
            covariates[static_cast<std::size_t>(c)].value_at(pos.x, pos.y);
    }
    std::size_t slot = 0;
    auto add_group = [&](int g) {
      const GroupInfo& gi = layout.groups[static_cast<std::size_t>(g)];
      for (int k = 0; k < gi.size; ++k) {
        lp += theta[static_cast<std::size_t>(gi.offset + k)] * buf[slot++];
      }
    };
    add_group(layout.intra_group(tau));
    for (int j = 1; j <= spec.p; ++j) {
      if (j != tau) add_group(layout.inter_group(tau, j));
    }
    return lp;
  };

  double potential = 0.0;
  std::size_t accepted = 0, proposed = 0;
  if (diagnostics) {
    diagnostics->potential_trace.clear();
    diagnostics->potential_trace.reserve(static_cast<std::size_t>(sweeps));
    diagnostics->acceptance_rate = 0.0;
  }
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t id = static_cast<std::size_t>(chain.uniform_index(n));
      const int tau = state.type[id];
      const Point old_pos{state.x[id], state.y[id]};
      const Point new_pos{chain.uniform(window.x_min, window.x_max),
                          chain.uniform(window.y_min, window.y_max)};
      const std::int64_t ex = static_cast<std::int64_t>(id);
      const double lp_old = log_lambda(old_pos, tau, ex);
      const double lp_new = log_lambda(new_pos, tau, ex);
      const double delta = lp_new - lp_old;
      ++proposed;
      if (delta >= 0.0 || chain.uniform() < std::exp(delta)) {
        grid.move(id, new_pos);
        potential += delta;
        ++accepted;
      }
    }
    if (diagnostics) diagnostics->potential_trace.push_back(potential);
  }
  if (diagnostics && proposed > 0) {
    diagnostics->acceptance_rate =
        static_cast<double>(accepted) / static_cast<double>(proposed);
  }
  return state;
}

}  // namespace mgibbs
