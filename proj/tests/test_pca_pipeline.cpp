#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mgibbs/config.hpp"
#include "mgibbs/io.hpp"
#include "mgibbs/pca.hpp"
#include "mgibbs/pipeline.hpp"
#include "mgibbs/simulate.hpp"
#include "test_util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mgibbs;
using namespace testutil;

namespace {

CovariateField noisy_field(const Window& w, double cell, RngStream& rng) {
  CovariateField f = CovariateField::over_window(w, cell);
  for (double& v : f.values) v = rng.uniform(-1, 1);
  return f;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("pca of covariate rasters") {
  RngStream rng(91);
  const Window w(0, 100, 0, 100);
  SUBCASE("full rank reconstructs the standardized matrix") {
    std::vector<CovariateField> rasters;
    for (int r = 0; r < 4; ++r) rasters.push_back(noisy_field(w, 10.0, rng));
    const PcaResult res = pca_covariates(rasters, 4);
    REQUIRE(res.components.size() == 4);
    CHECK(res.cumulative_variance.back() == doctest::Approx(1.0).epsilon(1e-10));
    // Reconstruction: scores * V^T; verify column 0 of the standardized
    // matrix cell-wise via the orthonormality of V.
    // With all components kept, the captured variance is exact, and each
    // original (standardized) raster is recovered by projecting back.
    // Check total energy instead: sum of squared scores equals cells * m.
    double energy = 0.0;
    for (const auto& comp : res.components) {
      for (double v : comp.values) energy += v * v;
    }
    CHECK(energy ==
          doctest::Approx(4.0 * rasters[0].cell_count()).epsilon(1e-8));
  }
  SUBCASE("two identical rasters collapse to one component") {
    std::vector<CovariateField> rasters;
    rasters.push_back(noisy_field(w, 10.0, rng));
    rasters.push_back(rasters[0]);
    rasters[1].name = "copy";
    const PcaResult res = pca_covariates(rasters, 1);
    CHECK(res.cumulative_variance[0] >= 0.999);
  }
  SUBCASE("six latent maps in fifteen rasters capture most variance") {
    std::vector<CovariateField> latent;
    for (int l = 0; l < 6; ++l) latent.push_back(noisy_field(w, 10.0, rng));
    std::vector<CovariateField> rasters;
    for (int r = 0; r < 15; ++r) {
      CovariateField f = CovariateField::over_window(w, 10.0);
      for (int l = 0; l < 6; ++l) {
        const double coef = rng.uniform(-1, 1);
        for (std::size_t c = 0; c < f.values.size(); ++c) {
          f.values[c] += coef * latent[static_cast<std::size_t>(l)].values[c];
        }
      }
      for (double& v : f.values) v += 0.25 * rng.normal();
      rasters.push_back(std::move(f));
    }
    const PcaResult res = pca_covariates(rasters, 6);
    CHECK(res.cumulative_variance.back() >= 0.70);
  }
  SUBCASE("constant raster is dropped with a note") {
    std::vector<CovariateField> rasters;
    rasters.push_back(noisy_field(w, 10.0, rng));
    CovariateField flat = CovariateField::over_window(w, 10.0);
    flat.name = "flat";
    rasters.push_back(flat);
    const PcaResult res = pca_covariates(rasters, 1);
    REQUIRE(res.dropped.size() == 1);
    CHECK(res.dropped[0] == "flat");
  }
}

TEST_CASE("raster file round trip") {
  RngStream rng(92);
  CovariateField f(0.0, 0.0, 2.5, 2.0, 8, 5);
  for (double& v : f.values) v = dyadic(rng);
  write_raster(f, "/tmp/mgibbs_raster_test.txt");
  const CovariateField back = read_raster("/tmp/mgibbs_raster_test.txt");
  CHECK(back.nx == 8);
  CHECK(back.ny == 5);
  CHECK(back.dx == 2.5);
  CHECK(back.values == f.values);
}

TEST_CASE("config parsing is strict") {
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(parse_config_text("model.rang = 1,2\n"),
                         doctest::Contains("unknown config key"),
                         std::invalid_argument);
  }
  SUBCASE("values parse and echo round-trips") {
    const std::string text =
        "pattern = pts.csv\n"
        "output = out\n"
        "seed = 9\n"
        "window = 0 10 0 5\n"
        "model.family = saturation\n"
        "model.ranges = 0.5,1\n"
        "cv.kx = 3\n"
        "cv.ky = 2\n"
        "mc.sims = 99\n";
    const PipelineConfig cfg = parse_config_text(text);
    CHECK(cfg.seed == 9);
    CHECK(cfg.window.x_max == 10.0);
    CHECK(cfg.ranges == std::vector<double>{0.5, 1.0});
    CHECK(cfg.cv_kx == 3);
    const PipelineConfig again = parse_config_text(cfg.echo());
    CHECK(again.echo() == cfg.echo());
  }
  SUBCASE("validation catches bad settings") {
    PipelineConfig cfg = parse_config_text(
        "window = 0 10 0 10\nmodel.ranges = 1,0.5\n");
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    PipelineConfig cfg2 = parse_config_text(
        "window = 0 10 0 10\nmodel.ranges = 0.5,1\nborder = 0.7\n");
    CHECK_THROWS_AS(cfg2.validate(), std::invalid_argument);
  }
}

namespace {

// Small end-to-end configuration on a simulated two-type pattern.
PipelineConfig small_pipeline_config(const std::string& dir) {
  std::filesystem::create_directories(dir);
  RngStream rng(4242);
  const Window w(0, 10, 0, 10);
  ModelSpec spec = ModelSpec::shared_ranges(2, InteractionFamily::saturation,
                                            {0.3});
  spec.set_constant_saturations(1);
  const GroupLayout layout = GroupLayout::from_spec(spec);
  std::vector<double> theta(static_cast<std::size_t>(layout.dim), 0.0);
  theta[static_cast<std::size_t>(
      layout.groups[static_cast<std::size_t>(layout.inter_group(1, 2))].offset)] =
      0.8;
  const MultiTypePattern pat =
      sim_gibbs_fixed_n(spec, theta, {0, 90, 110}, w, 100, rng);
  write_pattern_csv(pat, {"", "a", "b"}, dir + "/pattern.csv");

  PipelineConfig cfg = parse_config_text(
      "pattern = " + dir + "/pattern.csv\n" +
      "output = " + dir + "/out\n" +
      "seed = 31\n"
      "window = 0 10 0 10\n"
      "model.ranges = 0.15,0.3\n"
      "dummy.min = 200\n"
      "cv.kx = 2\n"
      "cv.ky = 2\n"
      "lasso.grid_size = 25\n");
  return cfg;
}

}  // namespace

TEST_CASE("pipeline end to end") {
  const std::string dir = "/tmp/mgibbs_pipe_test";
  std::filesystem::remove_all(dir);
  const PipelineConfig cfg = small_pipeline_config(dir);
  const RunReport report = run_pipeline(cfg, true);

  SUBCASE("matrices exist for every rule with the right shape") {
    for (const std::string rule :
         {"aic05", "cv_raw", "cv_inverse", "cv_pearson"}) {
      REQUIRE(report.matrices.count(rule) == 1);
      CHECK(report.matrices.at(rule).p == 2);
      CHECK(std::filesystem::exists(dir + "/out/matrix_" + rule + ".csv"));
      CHECK(std::filesystem::exists(dir + "/out/matrix_" + rule + ".pgm"));
    }
  }
  SUBCASE("selected gammas belong to the emitted grid") {
    std::ifstream path_csv(dir + "/out/path.csv");
    std::string line;
    std::getline(path_csv, line);  // header
    std::vector<std::string> gammas;
    while (std::getline(path_csv, line)) {
      gammas.push_back(split(line, ',')[0]);
    }
    CHECK(gammas.size() == 25);
    for (const auto& [rule, gamma] : report.selected_gamma) {
      const std::string g = format_double(gamma);
      CHECK(std::count(gammas.begin(), gammas.end(), g) == 1);
    }
  }
  SUBCASE("rerun with the same config is byte-identical") {
    std::map<std::string, std::string> first;
    for (const std::string& f : report.files) first[f] = slurp(f);
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    const RunReport again = run_pipeline(cfg, true);
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
    REQUIRE(again.files.size() == report.files.size());
    for (const std::string& f : again.files) {
      CHECK(slurp(f) == first[f]);
    }
  }
  SUBCASE("config echo reproduces the run") {
    const PipelineConfig echoed =
        parse_config_text(slurp(dir + "/out/config_echo.cfg"));
    const std::string dir2 = dir + "/again";
    PipelineConfig cfg2 = echoed;
    cfg2.output_dir = dir2;
    const RunReport rerun = run_pipeline(cfg2, true);
    for (const std::string& f : report.files) {
      const std::string name = std::filesystem::path(f).filename().string();
      if (name == "config_echo.cfg") continue;  // differs by output path
      CHECK(slurp(f) == slurp(dir2 + "/" + name));
    }
  }
}

TEST_CASE("mctest writes p-value and indicator matrices") {
  const std::string dir = "/tmp/mgibbs_mctest_cli";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  RngStream rng(9);
  const MultiTypePattern pat = sim_binomial(Window(0, 10, 0, 10), {0, 50, 60}, rng);
  write_pattern_csv(pat, {"", "1", "2"}, dir + "/p.csv");
  PipelineConfig cfg = parse_config_text(
      "pattern = " + dir + "/p.csv\n" +
      "output = " + dir + "/out\n" +
      "window = 0 10 0 10\n"
      "model.ranges = 0.5\n"
      "mc.bandwidth = 2\n"
      "mc.cell = 0.25\n"
      "mc.r_min = 0.25\n"
      "mc.r_max = 2\n"
      "mc.r_step = 0.25\n"
      "mc.sims = 39\n");
  const auto files = run_mctest(cfg);
  CHECK(std::filesystem::exists(dir + "/out/mc_pvalues.csv"));
  CHECK(std::filesystem::exists(dir + "/out/mc_indicators.pgm"));
  // PGM header sanity
  std::ifstream pgm(dir + "/out/mc_indicators.pgm");
  std::string magic;
  pgm >> magic;
  CHECK(magic == "P2");
}
