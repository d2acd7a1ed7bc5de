#include "mgibbs/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mgibbs {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) {
    // Trim surrounding whitespace.
    const auto a = field.find_first_not_of(" \t\r");
    const auto b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

PatternFile read_pattern_csv(const std::string& path, const Window& window) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file " + path);
  const std::vector<std::string> header = split(line, ',');
  if (header.size() < 3 || header[0] != "x" || header[1] != "y" ||
      header[2] != "type") {
    throw std::runtime_error(path + ": expected header x,y,type");
  }

  struct Raw {
    double x, y;
    std::string label;
  };
  std::vector<Raw> raws;
  bool all_numeric = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() < 3) throw std::runtime_error(path + ": short row: " + line);
    raws.push_back({parse_double(f[0]), parse_double(f[1]), f[2]});
    if (all_numeric) {
      all_numeric = !f[2].empty() &&
                    f[2].find_first_not_of("0123456789") == std::string::npos;
    }
  }

  PatternFile out;
  out.labels.push_back("");  // index 0 unused
  std::unordered_map<std::string, int> label_to_type;
  if (all_numeric) {
    int p = 0;
    for (const Raw& r : raws) p = std::max(p, std::stoi(r.label));
    out.pattern = MultiTypePattern(window, p);
    for (int t = 1; t <= p; ++t) out.labels.push_back(std::to_string(t));
    for (const Raw& r : raws) {
      const int t = std::stoi(r.label);
      if (t < 1) throw std::runtime_error(path + ": type labels must be >= 1");
      out.pattern.add(r.x, r.y, t);
    }
  } else {
    // String labels, first-appearance order.
    for (const Raw& r : raws) {
      if (label_to_type.emplace(r.label, static_cast<int>(out.labels.size()))
              .second) {
        out.labels.push_back(r.label);
      }
    }
    out.pattern = MultiTypePattern(window,
                                   static_cast<int>(out.labels.size()) - 1);
    for (const Raw& r : raws) {
      out.pattern.add(r.x, r.y, label_to_type.at(r.label));
    }
  }
  out.pattern.validate();
  return out;
}

void write_pattern_csv(const MultiTypePattern& pattern,
                       const std::vector<std::string>& labels,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "x,y,type\n";
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const int t = pattern.type[i];
    out << format_double(pattern.x[i]) << "," << format_double(pattern.y[i])
        << ","
        << (static_cast<std::size_t>(t) < labels.size()
                ? labels[static_cast<std::size_t>(t)]
                : std::to_string(t))
        << "\n";
  }
}

CovariateField read_raster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  int nx, ny;
  double x0, y0, dx, dy;
  if (!(in >> nx >> ny >> x0 >> y0 >> dx >> dy)) {
    throw std::runtime_error(path + ": bad raster header");
  }
  if (nx < 1 || ny < 1 || !(dx > 0.0) || !(dy > 0.0)) {
    throw std::runtime_error(path + ": invalid raster dimensions");
  }
  CovariateField f(x0, y0, dx, dy, nx, ny);
  for (double& v : f.values) {
    if (!(in >> v)) throw std::runtime_error(path + ": short raster data");
  }
  f.name = path;
  return f;
}

void write_raster(const CovariateField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << field.nx << " " << field.ny << " " << format_double(field.x0) << " "
      << format_double(field.y0) << " " << format_double(field.dx) << " "
      << format_double(field.dy) << "\n";
  for (int iy = 0; iy < field.ny; ++iy) {
    for (int ix = 0; ix < field.nx; ++ix) {
      out << format_double(field.at(ix, iy)) << (ix + 1 == field.nx ? "" : " ");
    }
    out << "\n";
  }
}

void write_matrix_csv(const std::vector<int>& matrix, int p,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      out << matrix[static_cast<std::size_t>(i) * p + j]
          << (j + 1 == p ? "" : ",");
    }
    out << "\n";
  }
}

void write_matrix_csv(const std::vector<double>& matrix, int p,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      out << format_double(matrix[static_cast<std::size_t>(i) * p + j])
          << (j + 1 == p ? "" : ",");
    }
    out << "\n";
  }
}

void write_matrix_pgm(const std::vector<int>& matrix, int p,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "P2\n" << p << " " << p << "\n255\n";
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      out << (matrix[static_cast<std::size_t>(i) * p + j] ? 255 : 0)
          << (j + 1 == p ? "" : " ");
    }
    out << "\n";
  }
}

}  // namespace mgibbs
