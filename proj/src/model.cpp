#include "mgibbs/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mgibbs {

ModelSpec ModelSpec::shared_ranges(int p, InteractionFamily family,
                                   const std::vector<double>& r,
                                   int covariate_count) {
  ModelSpec spec;
  spec.p = p;
  spec.family = family;
  spec.covariate_count = covariate_count;
  spec.ranges.assign(static_cast<std::size_t>(pair_count(p)), r);
  spec.saturations.assign(static_cast<std::size_t>(p) * p,
                          std::vector<int>(r.size(), 1));
  return spec;
}

double ModelSpec::max_range() const {
  double m = 0.0;
  for (const auto& r : ranges) {
    if (!r.empty()) m = std::max(m, r.back());
  }
  return m;
}

void ModelSpec::validate() const {
  if (p < 1) throw std::invalid_argument("type count must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  if (covariate_count < 0) {
    throw std::invalid_argument("covariate count must be >= 0");
  }
  if (ranges.size() != static_cast<std::size_t>(pair_count(p))) {
    throw std::invalid_argument("one range vector per unordered pair required");
  }
  for (const auto& r : ranges) {
    double prev = 0.0;
    for (double v : r) {
      if (!(v > prev)) {
        throw std::invalid_argument(
            "range vectors must be strictly increasing and positive");
      }
      prev = v;
    }
  }
  if (family == InteractionFamily::saturation) {
    if (saturations.size() != static_cast<std::size_t>(p) * p) {
      throw std::invalid_argument("one saturation vector per ordered pair");
    }
    for (int i = 1; i <= p; ++i) {
      for (int j = 1; j <= p; ++j) {
        const auto& c = ordered_saturations(i, j);
        if (c.size() != pair_ranges(i, j).size()) {
          throw std::invalid_argument("saturation/range length mismatch");
        }
        for (int v : c) {
          if (v < 1) throw std::invalid_argument("saturations must be >= 1");
        }
      }
    }
  }
}

void ModelSpec::set_auto_saturations(const std::vector<int>& counts_by_type,
                                     double window_area) {
  if (counts_by_type.size() != static_cast<std::size_t>(p) + 1) {
    throw std::invalid_argument("counts_by_type must have size p+1");
  }
  saturations.assign(static_cast<std::size_t>(p) * p, {});
  for (int i = 1; i <= p; ++i) {
    for (int j = 1; j <= p; ++j) {
      const auto& r = pair_ranges(i, j);
      auto& c = saturations[static_cast<std::size_t>((i - 1) * p + (j - 1))];
      c.resize(r.size());
      double prev = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) {
        const double annulus_area =
            std::numbers::pi * (r[k] * r[k] - prev * prev);
        c[k] = saturation_auto(counts_by_type[static_cast<std::size_t>(j)],
                               annulus_area, window_area, epsilon);
        prev = r[k];
      }
    }
  }
}

void ModelSpec::set_constant_saturations(int cval) {
  if (cval < 1) throw std::invalid_argument("saturation must be >= 1");
  saturations.assign(static_cast<std::size_t>(p) * p, {});
  for (int i = 1; i <= p; ++i) {
    for (int j = 1; j <= p; ++j) {
      saturations[static_cast<std::size_t>((i - 1) * p + (j - 1))]
          .assign(pair_ranges(i, j).size(), cval);
    }
  }
}

double poisson_cdf(int k, double a) {
  if (a < 0.0) throw std::invalid_argument("poisson_cdf: a must be >= 0");
  if (k < 0) return 0.0;
  if (a == 0.0) return 1.0;
  if (a > 1e4) {
    // Normal approximation with continuity correction; only reached far
    // beyond the abundances this model is used at.
    return 0.5 * std::erfc(-(k + 0.5 - a) / std::sqrt(2.0 * a));
  }
  if (a <= 700.0) {
    double term = std::exp(-a);
    double sum = term;
    for (int i = 1; i <= k; ++i) {
      term *= a / i;
      sum += term;
    }
    return std::min(sum, 1.0);
  }
  // exp(-a) underflows: accumulate terms scaled by the mode value.
  const int mode = static_cast<int>(a);
  const double log_mode = mode * std::log(a) - a - std::lgamma(mode + 1.0);
  double sum = 0.0;
  double term = 1.0;  // relative to the mode term
  for (int i = mode; i >= 0; --i) {
    sum += term;
    term *= i / a;
    if (term < 1e-18 * sum) break;
  }
  term = 1.0;
  for (int i = mode + 1; i <= k; ++i) {
    term *= a / i;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  if (k < mode) {
    // Redo upward only to k.
    sum = 0.0;
    term = 1.0;
    for (int i = mode; i >= 0; --i) {
      if (i <= k) sum += term;
      term *= i / a;
      if (i <= k && term < 1e-18 * sum) break;
    }
  }
  return std::min(sum * std::exp(log_mode), 1.0);
}

int saturation_auto(int n_j, double annulus_area, double window_area,
                    double epsilon) {
  if (n_j < 0) throw std::invalid_argument("saturation_auto: n_j must be >= 0");
  if (!(annulus_area > 0.0) || !(window_area > 0.0)) {
    throw std::invalid_argument("saturation_auto: areas must be positive");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("saturation_auto: epsilon must be in (0, 1)");
  }
  const double a = annulus_area * n_j / window_area;
  if (a == 0.0) return 1;
  const double target = 1.0 - epsilon;
  // Smallest c with F_a(c) >= 1 - epsilon, by the same stable summation as
  // poisson_cdf.
  if (a <= 700.0) {
    double term = std::exp(-a);
    double sum = term;
    int c = 0;
    while (sum < target) {
      ++c;
      term *= a / c;
      sum += term;
    }
    return std::max(1, c);
  }
  int c = static_cast<int>(a);
  while (poisson_cdf(c, a) < target) ++c;
  return std::max(1, c);
}

double t_function(int c, double a) {
  if (c < 1) throw std::invalid_argument("t_function: c must be >= 1");
  if (a < 0.0) throw std::invalid_argument("t_function: a must be >= 0");
  return c * (1.0 - poisson_cdf(c - 1, a)) +
         a * (poisson_cdf(c - 1, a) + poisson_cdf(c - 2, a));
}

GroupLayout GroupLayout::from_spec(const ModelSpec& spec) {
  GroupLayout layout;
  layout.p = spec.p;
  int offset = 0;
  auto push = [&](int size, bool penalized, std::string name) {
    layout.groups.push_back(GroupInfo{offset, size, penalized, std::move(name)});
    offset += size;
  };
  for (int i = 1; i <= spec.p; ++i) {
    push(spec.covariate_count + 1, false, "alpha_" + std::to_string(i));
  }
  for (int i = 1; i <= spec.p; ++i) {
    push(spec.steps(i, i), true,
         "beta_" + std::to_string(i) + "_" + std::to_string(i));
  }
  for (int i = 1; i <= spec.p; ++i) {
    for (int j = i + 1; j <= spec.p; ++j) {
      push(spec.steps(i, j), true,
           "beta_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  layout.dim = offset;
  return layout;
}

int GroupLayout::unpenalized_dim() const {
  int n = 0;
  for (const auto& g : groups) {
    if (!g.penalized) n += g.size;
  }
  return n;
}

}  // namespace mgibbs
