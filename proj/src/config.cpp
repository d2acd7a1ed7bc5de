#include "mgibbs/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mgibbs/io.hpp"

namespace mgibbs {

namespace {

std::vector<std::string> list_values(const std::string& value) {
  std::vector<std::string> out;
  std::string norm = value;
  for (char& c : norm) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(norm);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw std::invalid_argument("config key '" + key + "': " + why);
}

}  // namespace

PipelineConfig parse_config_text(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t\r");
      if (x == std::string::npos) return std::string();
      const auto y = s.find_last_not_of(" \t\r");
      return s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) bad(key, "empty value");

    if (key == "pattern") {
      cfg.pattern_path = value;
    } else if (key == "covariates") {
      cfg.covariate_paths = list_values(value);
    } else if (key == "output") {
      cfg.output_dir = value;
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "window") {
      const auto v = list_values(value);
      if (v.size() != 4) bad(key, "need x_min x_max y_min y_max");
      cfg.window = Window(parse_double(v[0]), parse_double(v[1]),
                          parse_double(v[2]), parse_double(v[3]));
      cfg.window_set = true;
    } else if (key == "model.family") {
      if (value == "saturation") {
        cfg.family = InteractionFamily::saturation;
      } else if (value == "strauss") {
        cfg.family = InteractionFamily::strauss;
      } else {
        bad(key, "expected saturation or strauss");
      }
    } else if (key == "model.ranges") {
      cfg.ranges.clear();
      for (const auto& s : list_values(value)) {
        cfg.ranges.push_back(parse_double(s));
      }
    } else if (key == "model.epsilon") {
      cfg.epsilon = parse_double(value);
    } else if (key == "model.pca") {
      cfg.pca_components = std::stoi(value);
    } else if (key == "dummy.factor") {
      cfg.dummy_factor = parse_double(value);
    } else if (key == "dummy.min") {
      cfg.dummy_min = std::stoi(value);
    } else if (key == "border") {
      cfg.border = parse_double(value);
    } else if (key == "cv.kx") {
      cfg.cv_kx = std::stoi(value);
    } else if (key == "cv.ky") {
      cfg.cv_ky = std::stoi(value);
    } else if (key == "cv.kinds") {
      cfg.cv_kinds.clear();
      for (const auto& s : list_values(value)) {
        if (s == "raw") {
          cfg.cv_kinds.push_back(ResidualKind::raw);
        } else if (s == "inverse") {
          cfg.cv_kinds.push_back(ResidualKind::inverse);
        } else if (s == "pearson") {
          cfg.cv_kinds.push_back(ResidualKind::pearson);
        } else {
          bad(key, "unknown residual kind " + s);
        }
      }
    } else if (key == "cv.regenerate_dummies") {
      cfg.cv_regenerate_dummies = value == "true" || value == "1";
    } else if (key == "lasso.grid_size") {
      cfg.grid_size = std::stoi(value);
    } else if (key == "lasso.grid_floor") {
      cfg.grid_floor = parse_double(value);
    } else if (key == "lasso.tol") {
      cfg.lasso_tol = parse_double(value);
    } else if (key == "lasso.kkt_tol") {
      cfg.lasso_kkt_tol = parse_double(value);
    } else if (key == "lasso.max_cycles") {
      cfg.lasso_max_cycles = std::stoi(value);
    } else if (key == "lasso.weight") {
      if (value == "paper") {
        cfg.weight_exponent = -0.5;
      } else if (value == "conventional") {
        cfg.weight_exponent = 0.5;
      } else {
        bad(key, "expected paper or conventional");
      }
    } else if (key == "mc.bandwidth") {
      cfg.mc_bandwidth = parse_double(value);
    } else if (key == "mc.cell") {
      cfg.mc_cell = parse_double(value);
    } else if (key == "mc.r_min") {
      cfg.mc_r_min = parse_double(value);
    } else if (key == "mc.r_max") {
      cfg.mc_r_max = parse_double(value);
    } else if (key == "mc.r_step") {
      cfg.mc_r_step = parse_double(value);
    } else if (key == "mc.sims") {
      cfg.mc_sims = std::stoi(value);
    } else if (key == "mc.test") {
      if (value == "studentised") {
        cfg.mc_test = McTest::studentised;
      } else if (value == "rank") {
        cfg.mc_test = McTest::rank;
      } else {
        bad(key, "expected studentised or rank");
      }
    } else if (key == "mc.alpha") {
      cfg.mc_alpha = parse_double(value);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

PipelineConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

SolverOptions PipelineConfig::solver_options() const {
  SolverOptions opts;
  opts.tol = lasso_tol;
  opts.kkt_tol = lasso_kkt_tol;
  opts.max_cycles = lasso_max_cycles;
  opts.weight_exponent = weight_exponent;
  return opts;
}

std::vector<double> PipelineConfig::mc_grid() const {
  std::vector<double> grid;
  for (double r = mc_r_min; r <= mc_r_max + 1e-12; r += mc_r_step) {
    grid.push_back(r);
  }
  return grid;
}

void PipelineConfig::validate() const {
  if (!window_set) throw std::invalid_argument("config: window is required");
  if (ranges.empty()) {
    throw std::invalid_argument("config: model.ranges is required");
  }
  double prev = 0.0;
  for (double r : ranges) {
    if (!(r > prev)) {
      throw std::invalid_argument(
          "config: model.ranges must be strictly increasing and positive");
    }
    prev = r;
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("config: model.epsilon must be in (0,1)");
  }
  if (!(dummy_factor > 0.0) || dummy_min < 1) {
    throw std::invalid_argument("config: invalid dummy settings");
  }
  if (border != 0.0 && border < ranges.back()) {
    throw std::invalid_argument(
        "config: border must be at least the maximal range");
  }
  if (cv_kx < 1 || cv_ky < 1 || cv_kx * cv_ky < 2) {
    throw std::invalid_argument("config: need at least 2 CV quadrats");
  }
  if (grid_size < 1 || !(grid_floor > 0.0) || grid_floor >= 1.0) {
    throw std::invalid_argument("config: invalid penalty grid settings");
  }
  if (mc_sims < 19 || !(mc_r_min > 0.0) || !(mc_r_max > mc_r_min) ||
      !(mc_r_step > 0.0) || !(mc_alpha > 0.0 && mc_alpha < 1.0)) {
    throw std::invalid_argument("config: invalid mc settings");
  }
}

std::string PipelineConfig::echo() const {
  std::ostringstream out;
  out << "pattern = " << pattern_path << "\n";
  if (!covariate_paths.empty()) {
    out << "covariates = ";
    for (std::size_t i = 0; i < covariate_paths.size(); ++i) {
      out << covariate_paths[i]
          << (i + 1 == covariate_paths.size() ? "" : ",");
    }
    out << "\n";
  }
  out << "output = " << output_dir << "\n";
  out << "seed = " << seed << "\n";
  out << "window = " << format_double(window.x_min) << " "
      << format_double(window.x_max) << " " << format_double(window.y_min)
      << " " << format_double(window.y_max) << "\n";
  out << "model.family = "
      << (family == InteractionFamily::saturation ? "saturation" : "strauss")
      << "\n";
  out << "model.ranges = ";
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    out << format_double(ranges[i]) << (i + 1 == ranges.size() ? "" : ",");
  }
  out << "\n";
  out << "model.epsilon = " << format_double(epsilon) << "\n";
  out << "model.pca = " << pca_components << "\n";
  out << "dummy.factor = " << format_double(dummy_factor) << "\n";
  out << "dummy.min = " << dummy_min << "\n";
  out << "border = " << format_double(border) << "\n";
  out << "cv.kx = " << cv_kx << "\n";
  out << "cv.ky = " << cv_ky << "\n";
  out << "cv.kinds = ";
  for (std::size_t i = 0; i < cv_kinds.size(); ++i) {
    out << residual_kind_name(cv_kinds[i])
        << (i + 1 == cv_kinds.size() ? "" : ",");
  }
  out << "\n";
  out << "cv.regenerate_dummies = " << (cv_regenerate_dummies ? "true" : "false")
      << "\n";
  out << "lasso.grid_size = " << grid_size << "\n";
  out << "lasso.grid_floor = " << format_double(grid_floor) << "\n";
  out << "lasso.tol = " << format_double(lasso_tol) << "\n";
  out << "lasso.kkt_tol = " << format_double(lasso_kkt_tol) << "\n";
  out << "lasso.max_cycles = " << lasso_max_cycles << "\n";
  out << "lasso.weight = "
      << (weight_exponent < 0.0 ? "paper" : "conventional") << "\n";
  out << "mc.bandwidth = " << format_double(mc_bandwidth) << "\n";
  out << "mc.cell = " << format_double(mc_cell) << "\n";
  out << "mc.r_min = " << format_double(mc_r_min) << "\n";
  out << "mc.r_max = " << format_double(mc_r_max) << "\n";
  out << "mc.r_step = " << format_double(mc_r_step) << "\n";
  out << "mc.sims = " << mc_sims << "\n";
  out << "mc.test = "
      << (mc_test == McTest::studentised ? "studentised" : "rank") << "\n";
  out << "mc.alpha = " << format_double(mc_alpha) << "\n";
  return out.str();
}

}  // namespace mgibbs
