#include "mgibbs/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "mgibbs/cv.hpp"
#include "mgibbs/io.hpp"
#include "mgibbs/mc_matrix.hpp"
#include "mgibbs/pca.hpp"

namespace mgibbs {

namespace {

template <class Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const pipeline_error&) {
    throw;
  } catch (const std::exception& e) {
    throw pipeline_error(name, e.what());
  }
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// Types sorted by ascending abundance (ties by index) with the mapping file.
std::vector<int> abundance_order(const std::vector<int>& counts) {
  std::vector<int> order(counts.size() - 1);
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return counts[static_cast<std::size_t>(a)] <
           counts[static_cast<std::size_t>(b)];
  });
  return order;
}

void write_ordered_matrix(const InteractionMatrix& m,
                          const std::vector<int>& order,
                          const std::string& base,
                          std::vector<std::string>& files) {
  const int p = m.p;
  std::vector<int> perm(static_cast<std::size_t>(p) * p, 0);
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) {
      perm[static_cast<std::size_t>(a) * p + b] =
          m.ind(order[static_cast<std::size_t>(a)],
                order[static_cast<std::size_t>(b)]);
    }
  }
  write_matrix_csv(perm, p, base + ".csv");
  write_matrix_pgm(perm, p, base + ".pgm");
  files.push_back(base + ".csv");
  files.push_back(base + ".pgm");
}

struct LoadedInputs {
  PatternFile data;
  std::vector<CovariateField> covariates;
};

LoadedInputs load_inputs(const PipelineConfig& cfg) {
  LoadedInputs in;
  in.data = read_pattern_csv(cfg.pattern_path, cfg.window);
  for (const std::string& path : cfg.covariate_paths) {
    in.covariates.push_back(read_raster(path));
  }
  return in;
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& cfg, bool with_cv) {
  cfg.validate();
  RunReport report;
  std::filesystem::create_directories(cfg.output_dir);
  auto emit = [&](const std::string& name) {
    report.files.push_back(join_path(cfg.output_dir, name));
    return report.files.back();
  };

  {
    std::ofstream echo(emit("config_echo.cfg"));
    echo << cfg.echo();
  }

  LoadedInputs in = stage("load", [&] { return load_inputs(cfg); });
  const MultiTypePattern& data = in.data.pattern;
  const std::vector<int> counts = data.counts_by_type();

  std::vector<CovariateField> covariates = in.covariates;
  if (cfg.pca_components > 0) {
    PcaResult pca = stage("pca", [&] {
      return pca_covariates(in.covariates, cfg.pca_components);
    });
    covariates = std::move(pca.components);
    for (const std::string& name : pca.dropped) {
      report.warnings.push_back("pca dropped constant raster " + name);
    }
    std::ofstream out(emit("pca_variance.csv"));
    out << "component,singular_value,cumulative_variance\n";
    for (std::size_t j = 0; j < pca.singular_values.size(); ++j) {
      out << (j + 1) << "," << format_double(pca.singular_values[j]) << ","
          << format_double(pca.cumulative_variance[j]) << "\n";
    }
  }

  ModelSpec spec = ModelSpec::shared_ranges(
      data.p, cfg.family, cfg.ranges, static_cast<int>(covariates.size()));
  spec.epsilon = cfg.epsilon;
  if (cfg.family == InteractionFamily::saturation) {
    spec.set_auto_saturations(counts, data.window.area());
  }
  const double r_bor = cfg.border > 0.0 ? cfg.border : spec.max_range();

  const RngStream root(cfg.seed);
  const DummySet dummies = stage("dummies", [&] {
    return generate_dummies(data.window, counts,
                            DummySpec{cfg.dummy_factor, cfg.dummy_min},
                            root.substream(1));
  });

  DesignData design = stage("design", [&] {
    return build_design(data, dummies, spec, covariates, r_bor);
  });
  for (const std::string& w : design.warnings) report.warnings.push_back(w);

  SolverOptions solver = cfg.solver_options();
  solver.compute_aic = true;
  report.gamma_max = stage("gamma_max", [&] { return gamma_max(design, solver); });
  const std::vector<double> grid =
      make_penalty_grid(report.gamma_max, cfg.grid_size, cfg.grid_floor);
  const PenaltyPath path =
      stage("path", [&] { return fit_path(design, grid, solver); });

  {
    std::ofstream out(emit("path.csv"));
    out << "gamma,objective,loglik,df,aic,iterations,converged,kkt,active_groups\n";
    for (std::size_t i = 0; i < path.fits.size(); ++i) {
      const FitResult& f = path.fits[i];
      out << format_double(path.grid[i]) << "," << format_double(f.objective)
          << "," << format_double(f.loglik) << "," << format_double(f.df)
          << "," << format_double(f.aic) << "," << f.iterations << ","
          << (f.converged ? 1 : 0) << "," << format_double(f.kkt_violation)
          << ",";
      bool first = true;
      for (std::size_t g = 0; g < design.layout.groups.size(); ++g) {
        if (design.layout.groups[g].penalized && f.active[g]) {
          if (!first) out << ";";
          out << design.layout.groups[g].name;
          first = false;
        }
      }
      out << "\n";
    }
  }

  report.abundance_order = abundance_order(counts);
  {
    std::ofstream out(emit("types.csv"));
    out << "rank,type,label,count\n";
    for (std::size_t a = 0; a < report.abundance_order.size(); ++a) {
      const int t = report.abundance_order[a];
      out << (a + 1) << "," << t << ","
          << in.data.labels[static_cast<std::size_t>(t)] << ","
          << counts[static_cast<std::size_t>(t)] << "\n";
    }
  }

  auto record_rule = [&](const std::string& rule, std::size_t grid_idx) {
    report.selected_gamma[rule] = grid[grid_idx];
    InteractionMatrix m = selected_groups(path.fits[grid_idx], design.layout);
    write_ordered_matrix(m, report.abundance_order,
                         join_path(cfg.output_dir, "matrix_" + rule),
                         report.files);
    report.matrices[rule] = std::move(m);
  };

  const double g_aic05 = stage("aic05", [&] { return aic05_gamma(path); });
  std::size_t aic_idx = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == g_aic05) aic_idx = i;
  }
  record_rule("aic05", aic_idx);

  if (with_cv) {
    const Partition part = stage("cv", [&] {
      return partition_window(data.window, cfg.cv_kx, cfg.cv_ky, r_bor);
    });
    report.cv_loss_fraction = part.loss_fraction;
    std::function<DesignData(int)> fold_design;
    if (cfg.cv_regenerate_dummies) {
      fold_design = [&, spec, covariates, r_bor](int fold) {
        const DummySet fresh = generate_dummies(
            data.window, counts, DummySpec{cfg.dummy_factor, cfg.dummy_min},
            root.substream(2, static_cast<std::uint64_t>(fold)));
        return build_design(data, fresh, spec, covariates, r_bor);
      };
    }
    const CvResult cv = stage("cv", [&] {
      return cv_select(design, grid, part, cfg.cv_kinds, cfg.solver_options(),
                       fold_design);
    });

    {
      std::ofstream out(emit("cv_folds.csv"));
      out << "fold,used,gamma,kind,residual,squared_residual\n";
      for (int k = 0; k < part.size(); ++k) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
          for (std::size_t q = 0; q < cfg.cv_kinds.size(); ++q) {
            const double r =
                cv.fold_residuals[static_cast<std::size_t>(k)]
                                 [g * cfg.cv_kinds.size() + q];
            out << k << "," << int(cv.fold_used[static_cast<std::size_t>(k)])
                << "," << format_double(grid[g]) << ","
                << residual_kind_name(cfg.cv_kinds[q]) << ","
                << format_double(r) << "," << format_double(r * r) << "\n";
          }
        }
      }
    }
    {
      std::ofstream out(emit("cv_summary.csv"));
      out << "kind,gamma,risk,selected\n";
      for (const CvCurve& curve : cv.curves) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
          out << residual_kind_name(curve.kind) << ","
              << format_double(grid[g]) << "," << format_double(curve.risk[g])
              << "," << (g == curve.gamma_index ? 1 : 0) << "\n";
        }
      }
    }
    for (const CvCurve& curve : cv.curves) {
      record_rule(std::string("cv_") + residual_kind_name(curve.kind),
                  curve.gamma_index);
    }
  }

  {
    std::ofstream out(emit("coefficients.csv"));
    out << "rule,gamma,group,index,value\n";
    for (const auto& [rule, gamma] : report.selected_gamma) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] == gamma) idx = i;
      }
      const FitResult& f = path.fits[idx];
      for (const GroupInfo& g : design.layout.groups) {
        for (int k = 0; k < g.size; ++k) {
          out << rule << "," << format_double(gamma) << "," << g.name << ","
              << (k + 1) << ","
              << format_double(f.theta[static_cast<std::size_t>(g.offset + k)])
              << "\n";
        }
      }
    }
  }

  {
    std::ofstream out(emit("report.txt"));
    out << "rows: " << design.row_count() << "\n";
    out << "types: " << data.p << "\n";
    out << "border: " << format_double(r_bor) << "\n";
    out << "gamma_max: " << format_double(report.gamma_max) << "\n";
    if (with_cv) {
      out << "cv_loss_fraction: " << format_double(report.cv_loss_fraction)
          << "\n";
    }
    for (const auto& [rule, gamma] : report.selected_gamma) {
      int active = 0;
      const InteractionMatrix& m = report.matrices.at(rule);
      for (int i = 1; i <= m.p; ++i) {
        for (int j = i; j <= m.p; ++j) active += m.ind(i, j);
      }
      out << "rule " << rule << ": gamma = " << format_double(gamma)
          << ", interactions = " << active << "\n";
    }
    for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
  }
  return report;
}

std::vector<std::string> run_mctest(const PipelineConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  std::vector<std::string> files;
  const PatternFile data = stage("load", [&] {
    return read_pattern_csv(cfg.pattern_path, cfg.window);
  });
  McOptions mc;
  mc.bandwidth = cfg.mc_bandwidth;
  mc.cell = cfg.mc_cell;
  mc.r_grid = cfg.mc_grid();
  mc.sims = cfg.mc_sims;
  mc.test = cfg.mc_test;
  mc.alpha = cfg.mc_alpha;
  const McMatrixResult res = stage("mctest", [&] {
    return interaction_test_matrix(data.pattern, mc,
                                   RngStream(cfg.seed).substream(3));
  });
  const std::vector<int> counts = data.pattern.counts_by_type();
  const std::vector<int> order = abundance_order(counts);
  const int p = data.pattern.p;

  std::vector<double> pvals(static_cast<std::size_t>(p) * p);
  std::vector<int> ind(static_cast<std::size_t>(p) * p);
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) {
      const int i = order[static_cast<std::size_t>(a)];
      const int j = order[static_cast<std::size_t>(b)];
      pvals[static_cast<std::size_t>(a) * p + b] = res.p_at(i, j);
      ind[static_cast<std::size_t>(a) * p + b] = res.indicators.ind(i, j);
    }
  }
  auto emit = [&](const std::string& name) {
    files.push_back(join_path(cfg.output_dir, name));
    return files.back();
  };
  {
    std::ofstream echo(emit("config_echo.cfg"));
    echo << cfg.echo();
  }
  write_matrix_csv(pvals, p, emit("mc_pvalues.csv"));
  write_matrix_csv(ind, p, emit("mc_indicators.csv"));
  write_matrix_pgm(ind, p, emit("mc_indicators.pgm"));
  {
    std::ofstream out(emit("mc_types.csv"));
    out << "rank,type,label,count\n";
    for (std::size_t a = 0; a < order.size(); ++a) {
      const int t = order[a];
      out << (a + 1) << "," << t << ","
          << data.labels[static_cast<std::size_t>(t)] << ","
          << counts[static_cast<std::size_t>(t)] << "\n";
    }
  }
  return files;
}

}  // namespace mgibbs
