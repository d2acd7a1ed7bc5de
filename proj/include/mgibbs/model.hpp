#pragma once

#include <span>
#include <string>
#include <vector>

#include "mgibbs/covariate.hpp"
#include "mgibbs/pattern.hpp"

namespace mgibbs {

enum class InteractionFamily { strauss, saturation };

// Triangular index of the unordered pair {i, j}, 1-based types, i <= j.
// Ordering: (1,1), (1,2), ..., (1,p), (2,2), ..., (p,p).
inline int pair_index(int i, int j, int p) {
  if (i > j) std::swap(i, j);
  const int a = i - 1, b = j - 1;
  return a * p - a * (a - 1) / 2 + (b - a);
}
inline int pair_count(int p) { return p * (p + 1) / 2; }

// Model definition: interaction family, per-pair range vectors (shared
// between (i,j) and (j,i)), per-ordered-pair saturation levels (asymmetric
// under the automatic rule, which uses the neighbour type's abundance), and
// the covariate count shared by all types.
struct ModelSpec {
  int p = 1;
  InteractionFamily family = InteractionFamily::saturation;
  // ranges[pair_index(i,j,p)] = strictly increasing positive radii; may be
  // empty (no interaction terms for that pair).
  std::vector<std::vector<double>> ranges;
  // saturations[(i-1)*p + (j-1)][k] = c_ijk for a type-i point counting
  // type-j neighbours in step k. Ignored for the Strauss family.
  std::vector<std::vector<int>> saturations;
  int covariate_count = 0;
  double epsilon = 0.01;

  static ModelSpec shared_ranges(int p, InteractionFamily family,
                                 const std::vector<double>& r,
                                 int covariate_count = 0);

  const std::vector<double>& pair_ranges(int i, int j) const {
    return ranges[static_cast<std::size_t>(pair_index(i, j, p))];
  }
  int steps(int i, int j) const {
    return static_cast<int>(pair_ranges(i, j).size());
  }
  const std::vector<int>& ordered_saturations(int i, int j) const {
    return saturations[static_cast<std::size_t>((i - 1) * p + (j - 1))];
  }

  double max_range() const;
  void validate() const;

  // Fill saturations from the (1-epsilon) Poisson quantile rule, using the
  // neighbour type's abundance: c_ijk from n_j and the step-k annulus area.
  void set_auto_saturations(const std::vector<int>& counts_by_type,
                            double window_area);
  // Set every saturation level to the same constant.
  void set_constant_saturations(int c);
};

// Poisson(a) CDF at k (k < 0 gives 0), by stable recursive term summation.
double poisson_cdf(int k, double a);

// Automatic saturation level: a = annulus_area * n_j / window_area, returns
// max(1, smallest c with F_a(c) >= 1 - epsilon).
int saturation_auto(int n_j, double annulus_area, double window_area,
                    double epsilon);

// Expected saturated neighbour statistic under independence,
// t(c) = c[1-F_a(c-1)] + a[F_a(c-1) + F_a(c-2)]; non-decreasing in c with
// limit 2a. Diagnostic companion of the saturation rule.
double t_function(int c, double a);

// Coefficient layout. Groups in order: one unpenalized covariate block per
// type (alpha_i, size covariate_count+1), one penalized intra block per type
// (beta_ii), one penalized block per unordered pair i<j (beta_ij). Groups may
// be empty when a pair has no ranges.
struct GroupInfo {
  int offset = 0;
  int size = 0;
  bool penalized = false;
  std::string name;
};

struct GroupLayout {
  std::vector<GroupInfo> groups;
  int dim = 0;
  int p = 0;

  static GroupLayout from_spec(const ModelSpec& spec);

  int alpha_group(int i) const { return i - 1; }
  int intra_group(int i) const { return p + (i - 1); }
  int inter_group(int i, int j) const {  // i != j
    return 2 * p + inter_pair_offset(i, j, p);
  }
  int group_count() const { return static_cast<int>(groups.size()); }
  int unpenalized_dim() const;

  // Pair group for (i, j): intra when i == j else the shared i<j group.
  int pair_group(int i, int j) const {
    return i == j ? intra_group(i) : inter_group(i, j);
  }

 private:
  static int inter_pair_offset(int i, int j, int p) {
    if (i > j) std::swap(i, j);
    const int a = i - 1, b = j - 1;
    return a * p - a * (a + 1) / 2 + (b - a - 1);
  }
};

// Named view over a flat coefficient vector.
struct ThetaView {
  const GroupLayout* layout;
  std::span<const double> flat;

  std::span<const double> group(int g) const {
    const GroupInfo& gi = layout->groups[static_cast<std::size_t>(g)];
    return flat.subspan(static_cast<std::size_t>(gi.offset),
                        static_cast<std::size_t>(gi.size));
  }
};

}  // namespace mgibbs
