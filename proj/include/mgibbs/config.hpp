#pragma once

#include <string>
#include <vector>

#include "mgibbs/cv.hpp"
#include "mgibbs/geometry.hpp"
#include "mgibbs/mc_matrix.hpp"
#include "mgibbs/model.hpp"

namespace mgibbs {

// Plain-text key = value configuration with dotted section names. Parsing is
// strict: an unknown key is an error, so a typo in a range vector cannot pass
// silently.
struct PipelineConfig {
  std::string pattern_path;
  std::vector<std::string> covariate_paths;
  std::string output_dir;
  std::uint64_t seed = 1;
  Window window;
  bool window_set = false;

  InteractionFamily family = InteractionFamily::saturation;
  std::vector<double> ranges;
  double epsilon = 0.01;
  int pca_components = 0;  // 0 = use covariates as given

  double dummy_factor = 4.0;
  int dummy_min = 500;

  double border = 0.0;  // 0 = maximal interaction range

  int cv_kx = 2;
  int cv_ky = 2;
  std::vector<ResidualKind> cv_kinds = {ResidualKind::raw,
                                        ResidualKind::inverse,
                                        ResidualKind::pearson};
  bool cv_regenerate_dummies = false;

  int grid_size = 100;
  double grid_floor = 1e-3;
  double lasso_tol = 1e-7;
  double lasso_kkt_tol = 1e-5;
  int lasso_max_cycles = 2000;
  double weight_exponent = -0.5;  // "paper"; +0.5 = "conventional"

  double mc_bandwidth = 30.0;
  double mc_cell = 2.0;
  double mc_r_min = 0.5;
  double mc_r_max = 15.0;
  double mc_r_step = 0.5;
  int mc_sims = 999;
  McTest mc_test = McTest::studentised;
  double mc_alpha = 0.05;

  SolverOptions solver_options() const;
  std::vector<double> mc_grid() const;
  // Normalized text sufficient to reproduce the run byte-for-byte.
  std::string echo() const;
  void validate() const;
};

PipelineConfig parse_config_text(const std::string& text);
PipelineConfig parse_config_file(const std::string& path);

}  // namespace mgibbs
