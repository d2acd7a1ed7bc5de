// Command-line front end: simulate | fit | cv | mctest | pca | experiment.
#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mgibbs/experiments.hpp"
#include "mgibbs/io.hpp"
#include "mgibbs/pca.hpp"
#include "mgibbs/pipeline.hpp"
#include "mgibbs/simulate.hpp"

namespace {

using namespace mgibbs;

// simulate parameter file: strict key = value lines, family-specific keys.
struct SimParams {
  std::map<std::string, std::string> kv;

  const std::string& get(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw std::invalid_argument("simulate params: missing key '" + key + "'");
    }
    return it->second;
  }
  bool has(const std::string& key) const { return kv.count(key) > 0; }
  double num(const std::string& key) const { return parse_double(get(key)); }
  std::vector<double> nums(const std::string& key) const {
    std::vector<double> out;
    std::string v = get(key);
    for (char& c : v) {
      if (c == ',') c = ' ';
    }
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok));
    return out;
  }
};

SimParams read_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  SimParams p;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) p.kv[key] = value;
  }
  return p;
}

Window window_from(const SimParams& p) {
  const std::vector<double> w = p.nums("window");
  if (w.size() != 4) {
    throw std::invalid_argument("window needs x_min x_max y_min y_max");
  }
  return Window(w[0], w[1], w[2], w[3]);
}

std::vector<int> counts_from(const SimParams& p) {
  std::vector<int> counts{0};
  for (double v : p.nums("counts")) counts.push_back(static_cast<int>(v));
  return counts;
}

int cmd_simulate(const std::string& params_path, std::uint64_t seed,
                 const std::string& out_path) {
  const SimParams p = read_params(params_path);
  const std::string model = p.get("model");
  const Window window = window_from(p);
  RngStream rng(seed);
  MultiTypePattern pattern;
  if (model == "binomial") {
    pattern = sim_binomial(window, counts_from(p), rng);
  } else if (model == "poisson") {
    pattern = sim_poisson(window, p.num("lambda"), rng);
  } else if (model == "ipp") {
    const CovariateField field = read_raster(p.get("field"));
    pattern = sim_ipp(window, field, static_cast<int>(p.num("n")), rng);
  } else if (model == "thomas") {
    ThomasSpec spec;
    spec.mu = p.num("mu");
    spec.sigma = p.num("sigma");
    if (p.has("kappa")) spec.kappa = p.num("kappa");
    if (p.has("parents")) spec.parent_count = static_cast<int>(p.num("parents"));
    CovariateField field;
    if (p.has("field")) {
      field = read_raster(p.get("field"));
      spec.parent_field = &field;
    }
    pattern = sim_thomas(window, spec, rng);
  } else if (model == "gibbs") {
    const std::vector<int> counts = counts_from(p);
    const int types = static_cast<int>(counts.size()) - 1;
    ModelSpec spec = ModelSpec::shared_ranges(
        types,
        p.has("family") && p.get("family") == "strauss"
            ? InteractionFamily::strauss
            : InteractionFamily::saturation,
        p.nums("ranges"));
    if (p.has("saturation")) {
      spec.set_constant_saturations(static_cast<int>(p.num("saturation")));
    }
    const GroupLayout layout = GroupLayout::from_spec(spec);
    std::vector<double> theta(static_cast<std::size_t>(layout.dim), 0.0);
    for (const auto& [key, value] : p.kv) {
      if (key.rfind("beta.", 0) != 0 && key.rfind("alpha.", 0) != 0) continue;
      std::vector<int> ids;
      std::istringstream ks(key.substr(key.find('.') + 1));
      std::string tok;
      while (std::getline(ks, tok, '.')) ids.push_back(std::stoi(tok));
      int g;
      if (key[0] == 'a') {
        g = layout.alpha_group(ids.at(0));
      } else if (ids.size() == 2 && ids[0] == ids[1]) {
        g = layout.intra_group(ids[0]);
      } else {
        g = layout.inter_group(ids.at(0), ids.at(1));
      }
      const GroupInfo& gi = layout.groups[static_cast<std::size_t>(g)];
      const SimParams vals{{{key, value}}};
      const std::vector<double> v = vals.nums(key);
      if (v.size() != static_cast<std::size_t>(gi.size)) {
        throw std::invalid_argument("coefficient length mismatch for " + key);
      }
      for (int k = 0; k < gi.size; ++k) {
        theta[static_cast<std::size_t>(gi.offset + k)] = v[static_cast<std::size_t>(k)];
      }
    }
    const int sweeps = p.has("sweeps") ? static_cast<int>(p.num("sweeps"))
                                       : kDefaultGibbsSweeps;
    pattern = sim_gibbs_fixed_n(spec, theta, counts, window, sweeps, rng);
  } else {
    throw std::invalid_argument("unknown model '" + model + "'");
  }
  std::vector<std::string> labels{""};
  for (int t = 1; t <= pattern.p; ++t) labels.push_back(std::to_string(t));
  write_pattern_csv(pattern, labels, out_path);
  std::cout << "wrote " << out_path << " (" << pattern.size() << " points)\n";
  return 0;
}

int cmd_experiment(int id, int replicates, std::uint64_t seed, int scenario,
                   int p, int count_per_type, bool with_mc, int mc_sims,
                   const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.id = id;
  cfg.replicates = replicates;
  cfg.seed = seed;
  cfg.scenario = scenario;
  cfg.p = p;
  cfg.count_per_type = count_per_type;
  cfg.mc_sims = mc_sims;
  std::filesystem::create_directories(out_dir);
  const ExperimentSetup setup = make_experiment(cfg);

  // Replicates + truth + manifest.
  std::ofstream manifest(
      (std::filesystem::path(out_dir) / "manifest.txt").string());
  const std::string truth_path =
      (std::filesystem::path(out_dir) / "truth.csv").string();
  write_matrix_csv(setup.truth.indicator, setup.truth.p, truth_path);
  manifest << "truth " << truth_path << "\n";
  std::vector<std::string> labels{""};
  for (int t = 1; t <= setup.p_types; ++t) labels.push_back(std::to_string(t));
  for (int rep = 0; rep < replicates; ++rep) {
    const MultiTypePattern pat = simulate_replicate(cfg, setup, rep);
    char name[64];
    std::snprintf(name, sizeof(name), "replicate_%03d.csv", rep);
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    write_pattern_csv(pat, labels, path);
    manifest << "replicate " << rep << " " << path << "\n";
  }

  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentRates rates = run_experiment(cfg, with_mc, SolverOptions{});
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ofstream out((std::filesystem::path(out_dir) / "rates.csv").string());
  out << "rule,tp,fp,intra_tp,intra_fp,inter_tp,inter_fp\n";
  for (std::size_t r = 0; r < rates.rules.size(); ++r) {
    const RateScores& s = rates.mean_rates[r];
    out << rates.rules[r] << "," << format_double(s.tp) << ","
        << format_double(s.fp) << "," << format_double(s.intra_tp) << ","
        << format_double(s.intra_fp) << "," << format_double(s.inter_tp) << ","
        << format_double(s.inter_fp) << "\n";
  }
  std::cout << "experiment " << id << ": " << replicates
            << " replicates fitted in " << secs << " s; rates in " << out_dir
            << "/rates.csv\n";
  return 0;
}

int cmd_pca(const std::vector<std::string>& rasters, int k,
            const std::string& out_dir) {
  std::vector<CovariateField> fields;
  for (const std::string& path : rasters) fields.push_back(read_raster(path));
  const PcaResult res = pca_covariates(fields, k);
  std::filesystem::create_directories(out_dir);
  for (std::size_t j = 0; j < res.components.size(); ++j) {
    write_raster(res.components[j],
                 (std::filesystem::path(out_dir) /
                  ("pc" + std::to_string(j + 1) + ".txt"))
                     .string());
  }
  std::ofstream out(
      (std::filesystem::path(out_dir) / "pca_variance.csv").string());
  out << "component,singular_value,cumulative_variance\n";
  for (std::size_t j = 0; j < res.singular_values.size(); ++j) {
    out << (j + 1) << "," << format_double(res.singular_values[j]) << ","
        << format_double(res.cumulative_variance[j]) << "\n";
  }
  for (const std::string& name : res.dropped) {
    std::cout << "dropped constant raster " << name << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multitype Gibbs point-pattern interaction toolkit"};
  app.require_subcommand(1);

  std::string params_path, out_path, config_path, out_dir;
  std::uint64_t seed = 1;
  auto* sim = app.add_subcommand("simulate", "generate a pattern CSV");
  sim->add_option("--params", params_path, "parameter file")->required();
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--out", out_path, "output CSV")->required();

  auto* fit = app.add_subcommand("fit", "penalty path + AIC0.5 selection");
  fit->add_option("--config", config_path, "config file")->required();

  auto* cv = app.add_subcommand("cv", "full pipeline with CV selection");
  cv->add_option("--config", config_path, "config file")->required();

  auto* mc = app.add_subcommand("mctest", "Monte Carlo interaction tests");
  mc->add_option("--config", config_path, "config file")->required();

  std::vector<std::string> raster_paths;
  int k = 1;
  auto* pca = app.add_subcommand("pca", "covariate reduction");
  pca->add_option("--rasters", raster_paths, "raster files")->required();
  pca->add_option("--k", k, "components")->required();
  pca->add_option("--out", out_dir, "output directory")->required();

  int exp_id = 1, replicates = 20, scenario = 0, p = 0, count_per_type = 100,
      mc_sims = 199;
  bool with_mc = false;
  auto* exp = app.add_subcommand("experiment", "synthetic benchmark harness");
  exp->add_option("id", exp_id, "experiment id (1,2,4,5)")->required();
  exp->add_option("--replicates", replicates, "replicate count");
  exp->add_option("--seed", seed, "RNG seed");
  exp->add_option("--scenario", scenario, "experiment 4 scenario 0-3");
  exp->add_option("--p", p, "type count override");
  exp->add_option("--counts", count_per_type, "experiment 2 points per type");
  exp->add_flag("--mc", with_mc, "also run the Monte Carlo baseline");
  exp->add_option("--mc-sims", mc_sims, "null simulations per MC test");
  exp->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(params_path, seed, out_path);
    if (fit->parsed() || cv->parsed()) {
      const PipelineConfig cfg = parse_config_file(config_path);
      const auto t0 = std::chrono::steady_clock::now();
      const RunReport report = run_pipeline(cfg, cv->parsed());
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      std::cout << "wrote " << report.files.size() << " files to "
                << cfg.output_dir << " in " << secs << " s\n";
      return 0;
    }
    if (mc->parsed()) {
      const PipelineConfig cfg = parse_config_file(config_path);
      const auto files = run_mctest(cfg);
      std::cout << "wrote " << files.size() << " files to " << cfg.output_dir
                << "\n";
      return 0;
    }
    if (pca->parsed()) return cmd_pca(raster_paths, k, out_dir);
    if (exp->parsed()) {
      return cmd_experiment(exp_id, replicates, seed, scenario, p,
                            count_per_type, with_mc, mc_sims, out_dir);
    }
  } catch (const mgibbs::pipeline_error& e) {
    std::cerr << "error " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
