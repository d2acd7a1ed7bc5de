#include "mgibbs/pca.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace mgibbs {

PcaResult pca_covariates(const std::vector<CovariateField>& rasters, int k) {
  if (rasters.empty()) throw std::invalid_argument("no rasters");
  const CovariateField& first = rasters.front();
  PcaResult result;

  std::vector<const CovariateField*> kept;
  for (const CovariateField& r : rasters) {
    if (r.nx != first.nx || r.ny != first.ny || r.dx != first.dx ||
        r.dy != first.dy || r.x0 != first.x0 || r.y0 != first.y0) {
      throw std::invalid_argument("rasters must share grid geometry");
    }
    if (r.stddev() == 0.0) {
      result.dropped.push_back(r.name.empty() ? "<unnamed>" : r.name);
    } else {
      kept.push_back(&r);
    }
  }
  const int m = static_cast<int>(kept.size());
  if (m == 0) throw std::invalid_argument("all rasters are constant");
  if (k < 1 || k > m) {
    throw std::invalid_argument("component count must be in 1..kept rasters");
  }

  const std::size_t cells = first.cell_count();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(cells), m);
  for (int c = 0; c < m; ++c) {
    const double mean = kept[static_cast<std::size_t>(c)]->mean();
    const double sd = kept[static_cast<std::size_t>(c)]->stddev();
    for (std::size_t i = 0; i < cells; ++i) {
      x(static_cast<Eigen::Index>(i), c) =
          (kept[static_cast<std::size_t>(c)]->values[i] - mean) / sd;
    }
  }

  // Eigendecomposition of X^T X gives the right singular vectors; scores
  // X v_j are the left singular vectors scaled by the singular values.
  const Eigen::MatrixXd gram = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  // Ascending eigenvalues; walk from the back.
  const double total = gram.trace();
  double captured = 0.0;
  for (int j = 0; j < k; ++j) {
    const int idx = m - 1 - j;
    const double ev = std::max(eig.eigenvalues()(idx), 0.0);
    captured += ev;
    result.singular_values.push_back(std::sqrt(ev));
    result.cumulative_variance.push_back(captured / total);
    const Eigen::VectorXd score = x * eig.eigenvectors().col(idx);
    CovariateField map(first.x0, first.y0, first.dx, first.dy, first.nx,
                       first.ny);
    map.name = "pc" + std::to_string(j + 1);
    for (std::size_t i = 0; i < cells; ++i) {
      map.values[i] = score(static_cast<Eigen::Index>(i));
    }
    result.components.push_back(std::move(map));
  }
  return result;
}

}  // namespace mgibbs
