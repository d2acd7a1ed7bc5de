#include "mgibbs/cv.hpp"

#include <algorithm>
#include <cmath>

namespace mgibbs {

int Partition::quadrat_of(double x, double y) const {
  int ix = static_cast<int>((x - window.x_min) / window.width() * kx);
  int iy = static_cast<int>((y - window.y_min) / window.height() * ky);
  ix = std::clamp(ix, 0, kx - 1);
  iy = std::clamp(iy, 0, ky - 1);
  return iy * kx + ix;
}

Partition partition_window(const Window& w, int kx, int ky, double r_bor) {
  if (kx < 1 || ky < 1) throw std::invalid_argument("need kx, ky >= 1");
  if (r_bor < 0.0) throw std::invalid_argument("r_bor must be >= 0");
  Partition part;
  part.window = w;
  part.kx = kx;
  part.ky = ky;
  part.r_bor = r_bor;
  const double wx = w.width() / kx;
  const double wy = w.height() / ky;
  double kept_area = 0.0;
  for (int iy = 0; iy < ky; ++iy) {
    for (int ix = 0; ix < kx; ++ix) {
      const Window q(w.x_min + ix * wx, w.x_min + (ix + 1) * wx,
                     w.y_min + iy * wy, w.y_min + (iy + 1) * wy);
      part.quadrats.push_back(q);
      try {
        part.eroded.push_back(r_bor > 0.0 ? q.eroded(r_bor) : q);
      } catch (const degenerate_window_error&) {
        throw partition_error(
            "border erosion collapses a quadrat; use fewer splits");
      }
      kept_area += part.eroded.back().area();
    }
  }
  part.loss_fraction = 1.0 - kept_area / w.area();
  return part;
}

const char* residual_kind_name(ResidualKind kind) {
  switch (kind) {
    case ResidualKind::raw: return "raw";
    case ResidualKind::inverse: return "inverse";
    case ResidualKind::pearson: return "pearson";
  }
  return "?";
}

double h_residual(const DesignData& design, const Partition& part, int k,
                  std::span<const double> theta, ResidualKind kind) {
  const Window& region = part.eroded[static_cast<std::size_t>(k)];
  double data_term = 0.0;
  double integral = 0.0;
  for (std::size_t r = 0; r < design.row_count(); ++r) {
    if (!region.contains(design.row_x[r], design.row_y[r])) continue;
    const double lambda = std::exp(design.linear_value(r, theta));
    if (design.is_data[r]) {
      switch (kind) {
        case ResidualKind::raw:
          data_term += 1.0;
          break;
        case ResidualKind::inverse:
          // 0/0 := 0 at a vanishing conditional intensity.
          if (lambda > 0.0) data_term += 1.0 / lambda;
          break;
        case ResidualKind::pearson:
          if (lambda > 0.0) data_term += 1.0 / std::sqrt(lambda);
          break;
      }
    } else if (kind != ResidualKind::inverse) {
      // Monte Carlo integral: sum of h * lambda / rho over dummies.
      const double hl =
          kind == ResidualKind::raw ? lambda : std::sqrt(lambda);
      integral += hl / design.rho[static_cast<std::size_t>(design.row_type[r])];
    }
  }
  if (kind == ResidualKind::inverse) {
    // h * lambda == 1: the integral is exactly |W_k eroded| per type.
    integral = design.p * region.area();
  }
  return data_term - integral;
}

void assign_folds(DesignData& design, const Partition& part) {
  for (std::size_t r = 0; r < design.row_count(); ++r) {
    design.fold[r] = part.quadrat_of(design.row_x[r], design.row_y[r]);
  }
}

const CvCurve& CvResult::curve(ResidualKind kind) const {
  for (const CvCurve& c : curves) {
    if (c.kind == kind) return c;
  }
  throw std::invalid_argument("kind not computed");
}

CvResult cv_select(DesignData& design, std::span<const double> grid,
                   const Partition& part,
                   const std::vector<ResidualKind>& kinds,
                   const SolverOptions& solver,
                   const std::function<DesignData(int)>& fold_design) {
  if (part.size() < 2) throw std::invalid_argument("need at least 2 folds");
  if (kinds.empty()) throw std::invalid_argument("no residual kinds requested");
  assign_folds(design, part);

  const int K = part.size();
  const std::size_t G = grid.size();
  const std::size_t Q = kinds.size();
  CvResult result;
  result.grid.assign(grid.begin(), grid.end());
  result.fold_residuals.assign(static_cast<std::size_t>(K),
                               std::vector<double>(G * Q, 0.0));
  result.fold_used.assign(static_cast<std::size_t>(K), 0);
  result.dummies_regenerated = static_cast<bool>(fold_design);

  SolverOptions fold_solver = solver;
  fold_solver.compute_aic = false;

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < K; ++k) {
    DesignData local;
    const DesignData* dptr = &design;
    if (fold_design) {
      local = fold_design(k);
      assign_folds(local, part);
      dptr = &local;
    }
    const DesignData& d = *dptr;
    std::vector<std::size_t> train_rows;
    for (std::size_t r = 0; r < d.row_count(); ++r) {
      if (d.fold[r] != k) train_rows.push_back(r);
    }
    PenaltyPath path;
    try {
      path = fit_path(d, grid, fold_solver, train_rows);
    } catch (const solver_error&) {
      continue;  // fold dropped
    }
    bool any_converged = false;
    for (std::size_t g = 0; g < G; ++g) {
      any_converged = any_converged || path.fits[g].converged;
      for (std::size_t q = 0; q < Q; ++q) {
        result.fold_residuals[static_cast<std::size_t>(k)][g * Q + q] =
            h_residual(d, part, k, path.fits[g].theta, kinds[q]);
      }
    }
    if (any_converged) result.fold_used[static_cast<std::size_t>(k)] = 1;
  }

  int used = 0;
  for (auto f : result.fold_used) used += f;
  if (used == 0) throw solver_error("every CV fold was dropped");

  for (std::size_t q = 0; q < Q; ++q) {
    CvCurve curve;
    curve.kind = kinds[q];
    curve.risk.assign(G, 0.0);
    for (std::size_t g = 0; g < G; ++g) {
      double s = 0.0;
      for (int k = 0; k < K; ++k) {
        if (!result.fold_used[static_cast<std::size_t>(k)]) continue;
        const double r =
            result.fold_residuals[static_cast<std::size_t>(k)][g * Q + q];
        s += r * r;
      }
      curve.risk[g] = s / used;
    }
    // Risk minimizer; grid is decreasing, strict < keeps the largest gamma
    // among ties (the sparsest model).
    std::size_t best = 0;
    for (std::size_t g = 1; g < G; ++g) {
      if (curve.risk[g] < curve.risk[best]) best = g;
    }
    curve.gamma_index = best;
    curve.gamma = result.grid[best];
    result.curves.push_back(std::move(curve));
  }
  return result;
}

}  // namespace mgibbs
