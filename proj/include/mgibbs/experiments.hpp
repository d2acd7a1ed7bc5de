#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgibbs/covariate.hpp"
#include "mgibbs/cv.hpp"
#include "mgibbs/dummies.hpp"
#include "mgibbs/group_lasso.hpp"
#include "mgibbs/mc_matrix.hpp"
#include "mgibbs/pattern.hpp"
#include "mgibbs/rng.hpp"
#include "mgibbs/simulate.hpp"

namespace mgibbs {

// Synthetic benchmark generators with known interaction structure:
//   1: four interacting types in a small window
//   2: two interacting blocks of five types
//   4: mostly-null patterns, optionally with one planted interacting type
//   5: independent inhomogeneous forest-like patterns (Thomas and saturation
//      families over a habitat field)
struct ExperimentConfig {
  int id = 1;
  int replicates = 20;
  std::uint64_t seed = 1;
  int p = 0;                 // 0 = experiment default
  int count_per_type = 100;  // experiment 2 intensity scenario
  // Experiment 4 scenario: 0 homogeneous, 1 homogeneous + 1 planted
  // interaction, 2 inhomogeneous, 3 inhomogeneous + 1 planted.
  int scenario = 0;
  int mh_sweeps = kDefaultGibbsSweeps;
  int mc_sims = 199;  // experiment 5 Monte Carlo baseline
};

struct ExperimentSetup {
  Window window;
  int p_types = 0;  // types in each generated pattern
  InteractionMatrix truth;
  std::vector<double> fit_ranges;
  double r_bor = 0.0;
  int cv_kx = 2;
  int cv_ky = 2;
  DummySpec dummy_spec;
  std::vector<CovariateField> fit_covariates;  // fixed across replicates
  std::vector<double> mc_r_grid;               // experiment 5 tests
  double mc_bandwidth = 30.0;
  double mc_cell = 2.0;

  // Generation internals, fixed at setup time.
  ModelSpec sim_spec;                 // experiments 1-2
  std::vector<double> sim_theta;     // experiments 1-2
  std::vector<int> counts;           // per type, index 0 unused
  std::vector<int> habitat_flag;     // experiment 5, per type
  std::vector<int> family_of_type;   // experiment 5: 0/1 Thomas, 2/3 Geyer
};

ExperimentSetup make_experiment(const ExperimentConfig& cfg);

MultiTypePattern simulate_replicate(const ExperimentConfig& cfg,
                                    const ExperimentSetup& setup, int rep);

// TP/FP rates of an estimated indicator matrix against a truth matrix;
// fields are NaN when the relevant entry class is empty. Off-diagonal rates
// count ordered pairs, which matches symmetric and asymmetric estimates
// alike.
struct RateScores {
  double tp, fp, intra_tp, intra_fp, inter_tp, inter_fp;
};
RateScores score_interactions(const InteractionMatrix& estimate,
                              const InteractionMatrix& truth);

struct ExperimentRates {
  std::vector<std::string> rules;      // cv_raw, cv_inverse, cv_pearson, aic05,
                                       // mc_studentised, mc_rank (when run)
  std::vector<RateScores> mean_rates;  // aligned with rules, NaN-aware means
  int replicates = 0;
};

// Simulate, fit, select and score `cfg.replicates` times; `with_mc` adds the
// Monte Carlo baseline (experiment 5's comparison).
ExperimentRates run_experiment(const ExperimentConfig& cfg, bool with_mc,
                               const SolverOptions& solver,
                               std::vector<InteractionMatrix>* matrices = nullptr);

}  // namespace mgibbs
