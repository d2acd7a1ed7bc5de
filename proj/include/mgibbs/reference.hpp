#pragma once

#include <span>
#include <vector>

#include "mgibbs/model.hpp"
#include "mgibbs/pattern.hpp"

// Serial brute-force reference implementations. These are the independent
// oracles the fast kernels are tested against and the baselines the benchmark
// compares them with; they favour directness over speed and must stay free of
// the indexed code paths.
namespace mgibbs::reference {

// O(n) distance scan with the (r_lo, r_hi] convention.
int count_annulus(const MultiTypePattern& pattern, const Point& center,
                  int target_type, double r_lo, double r_hi,
                  std::int64_t exclude_id = -1);

// Sufficient statistic vector v(x) in coefficient layout order: per-type
// covariate sums, intra-type saturated pair statistics, and symmetrized
// inter-type statistics s_ij + s_ji (both orientations carry the shared
// beta_ij coefficient).
std::vector<double> sufficient_statistics(
    const MultiTypePattern& pattern, const ModelSpec& spec,
    const GroupLayout& layout, const std::vector<CovariateField>& covariates);

// log of the unnormalized density, theta^T v(x).
double log_unnormalized_density(const MultiTypePattern& pattern,
                                const ModelSpec& spec,
                                const GroupLayout& layout,
                                std::span<const double> theta,
                                const std::vector<CovariateField>& covariates);

// v(x u u) - v(x \ u) for a marked point not contained in `pattern`;
// the brute-force design-row oracle.
std::vector<double> statistic_difference(
    const Point& pos, int tau, const MultiTypePattern& pattern,
    const ModelSpec& spec, const GroupLayout& layout,
    const std::vector<CovariateField>& covariates);

// Brute-force double-sum cross-K with explicit translation weights.
std::vector<double> cross_k(const MultiTypePattern& pattern, int type_i,
                            int type_j, const std::vector<double>& r_grid);

}  // namespace mgibbs::reference
