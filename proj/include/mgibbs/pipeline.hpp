#pragma once

#include <map>
#include <string>
#include <vector>

#include "mgibbs/config.hpp"
#include "mgibbs/group_lasso.hpp"

namespace mgibbs {

class pipeline_error : public std::runtime_error {
 public:
  pipeline_error(const std::string& stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RunReport {
  double gamma_max = 0.0;
  std::map<std::string, double> selected_gamma;         // by rule
  std::map<std::string, InteractionMatrix> matrices;    // by rule
  std::vector<int> abundance_order;                     // original type ids
  double cv_loss_fraction = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> files;                       // everything written
};

// load -> PCA -> dummies -> design -> gamma_max -> path (+AIC0.5) and, when
// `with_cv`, spatially blocked CV over all configured residual kinds. Every
// selected rule yields an interaction matrix (CSV + PGM, types ordered by
// ascending abundance). Outputs are a pure function of config + seed: reruns
// are byte-identical, timing goes to stdout only.
RunReport run_pipeline(const PipelineConfig& cfg, bool with_cv = true);

// `mctest` subcommand: Monte Carlo p-value and indicator matrices.
std::vector<std::string> run_mctest(const PipelineConfig& cfg);

}  // namespace mgibbs
