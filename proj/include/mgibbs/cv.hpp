#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "mgibbs/design.hpp"
#include "mgibbs/group_lasso.hpp"

namespace mgibbs {

class partition_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Disjoint quadrat tiling of the window; each quadrat carries its own
// border-eroded evaluation region.
struct Partition {
  Window window;
  int kx = 1;
  int ky = 1;
  double r_bor = 0.0;
  std::vector<Window> quadrats;
  std::vector<Window> eroded;
  double loss_fraction = 0.0;

  int size() const { return kx * ky; }
  int quadrat_of(double x, double y) const;
};

// Equal-size tiling; throws partition_error (suggesting fewer splits) when
// erosion collapses a quadrat.
Partition partition_window(const Window& w, int kx, int ky, double r_bor);

enum class ResidualKind { raw, inverse, pearson };
const char* residual_kind_name(ResidualKind kind);

// CV h-residual of quadrat k under theta (fitted without that quadrat):
// sum over types of [ sum_{data in W_k eroded} h - integral of h * lambda ].
// The integral is exact (|W_k eroded| per type) for the inverse kind and a
// dummy-point Monte Carlo estimate for raw/Pearson. All conditional
// intensities reuse the full-design rows: data rows condition on data \ u,
// dummy rows on the full data.
double h_residual(const DesignData& design, const Partition& part, int k,
                  std::span<const double> theta, ResidualKind kind);

// Stamp quadrat indices into design.fold.
void assign_folds(DesignData& design, const Partition& part);

struct CvCurve {
  ResidualKind kind = ResidualKind::inverse;
  std::vector<double> risk;     // R_CV per grid value
  double gamma = 0.0;           // selected penalty
  std::size_t gamma_index = 0;
};

struct CvResult {
  std::vector<double> grid;
  std::vector<CvCurve> curves;  // one per requested kind
  // fold_residuals[f][g * kinds + q] for fold f, grid index g, kind q.
  std::vector<std::vector<double>> fold_residuals;
  std::vector<std::uint8_t> fold_used;
  bool dummies_regenerated = false;

  const CvCurve& curve(ResidualKind kind) const;
};

// K-fold spatially blocked CV: per fold, the full path is fitted on rows
// outside the fold's quadrat (same dummy set unless `fold_design` regenerates
// one) and scored by squared h-residuals on the quadrat. Selection takes the
// risk minimizer, largest gamma among ties. Folds whose path never converged
// are dropped; throws solver_error when none remain.
CvResult cv_select(DesignData& design, std::span<const double> grid,
                   const Partition& part,
                   const std::vector<ResidualKind>& kinds,
                   const SolverOptions& solver,
                   const std::function<DesignData(int)>& fold_design = {});

}  // namespace mgibbs
