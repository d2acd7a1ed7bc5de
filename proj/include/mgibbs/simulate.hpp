#pragma once

#include <optional>
#include <vector>

#include "mgibbs/covariate.hpp"
#include "mgibbs/model.hpp"
#include "mgibbs/pattern.hpp"
#include "mgibbs/rng.hpp"

namespace mgibbs {

// Fixed-count uniform (binomial) pattern; counts_by_type has size p+1.
MultiTypePattern sim_binomial(const Window& window,
                              const std::vector<int>& counts_by_type,
                              RngStream rng);

// Univariate homogeneous Poisson with random count Poisson(lambda |W|).
MultiTypePattern sim_poisson(const Window& window, double lambda,
                             RngStream rng);

// Fixed-n conditional inhomogeneous Poisson: n points by rejection against
// the field's maximum. The homogeneous case is a constant field.
MultiTypePattern sim_ipp(const Window& window, const CovariateField& field,
                         int n, RngStream rng);

struct ThomasSpec {
  double kappa = 0.0;     // parent intensity per unit area, or
  int parent_count = 0;   // fixed parent count when > 0
  double mu = 1.0;        // mean offspring per parent
  double sigma = 1.0;     // Gaussian dispersal sd
  const CovariateField* parent_field = nullptr;  // unscaled parent intensity
};

// Thomas cluster process. Parents live on the window dilated by 4 sigma
// (raster lookups clamp at the window edge); offspring outside the window
// are dropped.
MultiTypePattern sim_thomas(const Window& window, const ThomasSpec& spec,
                            RngStream rng);

struct GibbsSimDiagnostics {
  // Log unnormalized density relative to the initial state, one entry per
  // sweep; lets callers judge equilibration and extend the run.
  std::vector<double> potential_trace;
  double acceptance_rate = 0.0;
};

inline constexpr int kDefaultGibbsSweeps = 500;

// Fixed-count Metropolis-Hastings for the multitype Gibbs model: uniform
// relocation proposals, acceptance exp(delta) with delta computed exactly
// through the conditional-intensity statistics. Per-type counts are invariant
// throughout. `sweeps` full sweeps (sum(n_i) proposals each) are performed
// before the state is returned.
MultiTypePattern sim_gibbs_fixed_n(
    const ModelSpec& spec, std::span<const double> theta,
    const std::vector<int>& counts_by_type, const Window& window, int sweeps,
    RngStream rng, const std::vector<CovariateField>& covariates = {},
    GibbsSimDiagnostics* diagnostics = nullptr);

}  // namespace mgibbs
