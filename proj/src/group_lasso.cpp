#include "mgibbs/group_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "mgibbs/parallel.hpp"

namespace mgibbs {

namespace {

constexpr double kSkipGradTol = 1e-9;    // unpenalized blocks this flat stay put
constexpr double kTightKkt = 1e-10;      // unpenalized-only fit tightness
constexpr double kSnapScale = 16.0 * std::numeric_limits<double>::epsilon();
// Trust-region cap on Newton steps: keeps the solver out of the flat logistic
// tails where the Hessian vanishes and raw steps explode.
constexpr double kNewtonStepCap = 8.0;

// Largest eigenvalue of a small symmetric matrix (row-major n x n) by cyclic
// Jacobi rotations.
double lambda_max_sym(std::vector<double> m, int n) {
  if (n == 1) return m[0];
  for (int sweep = 0; sweep < 30; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) off += std::abs(m[i * n + j]);
    }
    if (off < 1e-300) break;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double a_ij = m[i * n + j];
        if (a_ij == 0.0) continue;
        const double a_ii = m[i * n + i];
        const double a_jj = m[j * n + j];
        const double phi = 0.5 * std::atan2(2.0 * a_ij, a_jj - a_ii);
        const double c = std::cos(phi), s = std::sin(phi);
        for (int k = 0; k < n; ++k) {
          const double mik = m[i * n + k];
          const double mjk = m[j * n + k];
          m[i * n + k] = c * mik - s * mjk;
          m[j * n + k] = s * mik + c * mjk;
        }
        for (int k = 0; k < n; ++k) {
          const double mki = m[k * n + i];
          const double mkj = m[k * n + j];
          m[k * n + i] = c * mki - s * mkj;
          m[k * n + j] = s * mki + c * mkj;
        }
      }
    }
  }
  double lmax = m[0];
  for (int i = 1; i < n; ++i) lmax = std::max(lmax, m[i * n + i]);
  return lmax;
}

// In-place Cholesky factor (lower) of a small SPD matrix.
bool cholesky(std::vector<double>& m, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m[i * n + j];
      for (int k = 0; k < j; ++k) s -= m[i * n + k] * m[j * n + k];
      if (i == j) {
        if (s <= 0.0) return false;
        m[i * n + i] = std::sqrt(s);
      } else {
        m[i * n + j] = s / m[j * n + j];
      }
    }
  }
  return true;
}

void cholesky_solve(const std::vector<double>& l, int n,
                    std::vector<double>& b) {
  for (int i = 0; i < n; ++i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) s -= l[i * n + k] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = s / l[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) s -= l[k * n + i] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = s / l[i * n + i];
  }
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

class Fitter {
 public:
  Fitter(const DesignData& design, std::span<const std::size_t> rows,
         const SolverOptions& opts)
      : d_(design), opts_(opts) {
    if (rows.empty()) {
      rows_.resize(d_.row_count());
      std::iota(rows_.begin(), rows_.end(), std::size_t{0});
    } else {
      rows_.assign(rows.begin(), rows.end());
    }
    if (rows_.empty()) throw solver_error("empty row subset");

    const int n_classes = static_cast<int>(d_.support.size());
    class_rows_.assign(static_cast<std::size_t>(n_classes), {});
    for (std::size_t pos = 0; pos < rows_.size(); ++pos) {
      class_rows_[static_cast<std::size_t>(d_.row_type[rows_[pos]])].push_back(
          pos);
    }

    // Map each group to the (class, slab offset) pairs that carry it.
    const auto& groups = d_.layout.groups;
    touch_.assign(groups.size(), {});
    for (int c = 0; c < n_classes; ++c) {
      const auto& cols = d_.support[static_cast<std::size_t>(c)];
      if (cols.empty() || class_rows_[static_cast<std::size_t>(c)].empty())
        continue;
      std::size_t k = 0;
      while (k < cols.size()) {
        const int g = group_of_col(cols[k]);
        touch_[static_cast<std::size_t>(g)].push_back(
            {c, static_cast<int>(k)});
        k += static_cast<std::size_t>(groups[static_cast<std::size_t>(g)].size);
      }
    }

    build_majorizers();
    lin_.resize(rows_.size());
    sig_.resize(rows_.size());
  }

  const std::vector<std::size_t>& rows() const { return rows_; }

  double group_weight(int g) const {
    const int size = d_.layout.groups[static_cast<std::size_t>(g)].size;
    return std::pow(static_cast<double>(size), opts_.weight_exponent);
  }

  std::vector<double> gradient(std::span<const double> theta) {
    set_theta(theta);
    std::vector<double> grad(static_cast<std::size_t>(d_.layout.dim), 0.0);
    for (std::size_t g = 0; g < d_.layout.groups.size(); ++g) {
      const auto gg = group_gradient(static_cast<int>(g));
      const int off = d_.layout.groups[g].offset;
      for (std::size_t k = 0; k < gg.size(); ++k) {
        grad[static_cast<std::size_t>(off) + k] = gg[k];
      }
    }
    return grad;
  }

  // Tight Newton fit of the unpenalized blocks with penalized groups pinned
  // at zero; the anchor for gamma_max and the path start.
  std::vector<double> fit_unpenalized(double kkt_goal) {
    std::vector<double> theta(static_cast<std::size_t>(d_.layout.dim), 0.0);
    set_theta(theta);
    for (int iter = 0; iter < 200; ++iter) {
      double worst = 0.0;
      for (std::size_t g = 0; g < d_.layout.groups.size(); ++g) {
        const GroupInfo& gi = d_.layout.groups[g];
        if (gi.penalized || gi.size == 0) continue;
        std::vector<double> grad = group_gradient(static_cast<int>(g));
        double gn = 0.0;
        for (double v : grad) gn = std::max(gn, std::abs(v));
        worst = std::max(worst, gn);
        if (gn <= kkt_goal) continue;
        newton_block_step(static_cast<int>(g), grad);
      }
      if (worst <= kkt_goal) return theta_;
    }
    // Re-check: accept if within the ordinary tolerance, else report.
    double worst = 0.0;
    for (std::size_t g = 0; g < d_.layout.groups.size(); ++g) {
      const GroupInfo& gi = d_.layout.groups[g];
      if (gi.penalized || gi.size == 0) continue;
      for (double v : group_gradient(static_cast<int>(g))) {
        worst = std::max(worst, std::abs(v));
      }
    }
    if (worst <= opts_.kkt_tol) return theta_;
    throw solver_error("unpenalized fit stalled, max |grad| = " +
                       std::to_string(worst));
  }

  FitResult fit(double gamma, std::span<const double> theta_init,
                const std::vector<std::uint8_t>& frozen) {
    std::vector<double> theta(static_cast<std::size_t>(d_.layout.dim), 0.0);
    if (!theta_init.empty()) {
      std::copy(theta_init.begin(), theta_init.end(), theta.begin());
    }
    set_theta(theta);

    FitResult res;
    res.gamma = gamma;
    double obj = objective(gamma);
    for (int cycle = 1; cycle <= opts_.max_cycles; ++cycle) {
      sweep(gamma, frozen, false);
      const double nobj = objective(gamma);
      res.iterations = cycle;
      if (std::abs(nobj - obj) <= opts_.tol * (std::abs(nobj) + 1.0)) {
        res.kkt_violation = kkt_violation(gamma, frozen);
        if (res.kkt_violation <= opts_.kkt_tol) {
          res.converged = true;
          obj = nobj;
          break;
        }
      }
      obj = nobj;
    }
    if (!res.converged) res.kkt_violation = kkt_violation(gamma, frozen);
    res.theta = theta_;
    res.objective = obj;
    res.loglik = loglik();
    res.active.assign(d_.layout.groups.size(), 0);
    for (std::size_t g = 0; g < d_.layout.groups.size(); ++g) {
      const GroupInfo& gi = d_.layout.groups[g];
      if (!gi.penalized) continue;
      const double nrm = norm2(std::span<const double>(
          theta_.data() + gi.offset, static_cast<std::size_t>(gi.size)));
      res.active[g] = nrm > 0.0 ? 1 : 0;
    }
    res.gamma = gamma;
    return res;
  }

  double loglik() {
    return det_sum(rows_.size(), [&](std::size_t pos) {
      const std::size_t r = rows_[pos];
      const double eta = lin_[pos] + d_.offset[r];
      return (d_.is_data[r] ? eta : 0.0) - log1pexp(eta);
    });
  }

 private:
  int group_of_col(int col) const {
    const auto& groups = d_.layout.groups;
    int lo = 0, hi = static_cast<int>(groups.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi + 1) / 2;
      if (groups[static_cast<std::size_t>(mid)].offset <= col) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    return lo;
  }

  void build_majorizers() {
    const auto& groups = d_.layout.groups;
    vmaj_.assign(groups.size(), 0.0);
    chol_.assign(groups.size(), {});
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const int size = groups[g].size;
      if (size == 0 || touch_[g].empty()) continue;
      std::vector<double> gram = group_gram(static_cast<int>(g), nullptr);
      for (double& v : gram) v *= 0.25;
      if (groups[g].penalized) {
        vmaj_[g] = lambda_max_sym(gram, size);
      } else {
        double trace = 0.0;
        for (int i = 0; i < size; ++i) trace += gram[i * size + i];
        const double ridge = 1e-10 * (1.0 + trace / size);
        for (int i = 0; i < size; ++i) gram[i * size + i] += ridge;
        if (!cholesky(gram, size)) {
          throw solver_error("majorizer factorization failed for group " +
                             groups[g].name);
        }
        chol_[g] = std::move(gram);
      }
    }
  }

  // Gram of group g's columns over the active rows; when `weights` is given
  // (per position) the weighted Gram is returned.
  std::vector<double> group_gram(int g, const std::vector<double>* weights) {
    const int size = d_.layout.groups[static_cast<std::size_t>(g)].size;
    using Acc = std::vector<double>;
    Acc total(static_cast<std::size_t>(size) * size, 0.0);
    for (const Touch& t : touch_[static_cast<std::size_t>(g)]) {
      const auto& positions = class_rows_[static_cast<std::size_t>(t.cls)];
      Acc part = det_reduce<Acc>(
          positions.size(), Acc(total.size(), 0.0),
          [&](std::size_t i, Acc& acc) {
            const std::size_t pos = positions[i];
            const std::size_t r = rows_[pos];
            const double* vals = d_.values.data() + d_.row_ptr[r] + t.slab_off;
            const double w = weights ? (*weights)[pos] : 1.0;
            for (int a = 0; a < size; ++a) {
              for (int b = 0; b <= a; ++b) {
                acc[static_cast<std::size_t>(a) * size + b] +=
                    w * vals[a] * vals[b];
              }
            }
          },
          [](Acc& a, Acc& b) {
            for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
          });
      for (std::size_t k = 0; k < total.size(); ++k) total[k] += part[k];
    }
    for (int a = 0; a < size; ++a) {
      for (int b = a + 1; b < size; ++b) {
        total[static_cast<std::size_t>(a) * size + b] =
            total[static_cast<std::size_t>(b) * size + a];
      }
    }
    return total;
  }

  void set_theta(std::span<const double> theta) {
    theta_.assign(theta.begin(), theta.end());
    refresh_predictors();
  }

  void refresh_predictors() {
    auto update = [&](std::size_t pos) {
      const std::size_t r = rows_[pos];
      lin_[pos] = d_.linear_value(r, theta_);
      sig_[pos] = sigmoid(lin_[pos] + d_.offset[r]);
    };
    if (rows_.size() < 8192) {
      for (std::size_t pos = 0; pos < rows_.size(); ++pos) update(pos);
    } else {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows_.size());
           ++i) {
        update(static_cast<std::size_t>(i));
      }
    }
  }

  std::vector<double> group_gradient(int g) {
    const int size = d_.layout.groups[static_cast<std::size_t>(g)].size;
    using Acc = std::vector<double>;
    Acc total(static_cast<std::size_t>(size), 0.0);
    for (const Touch& t : touch_[static_cast<std::size_t>(g)]) {
      const auto& positions = class_rows_[static_cast<std::size_t>(t.cls)];
      Acc part = det_reduce<Acc>(
          positions.size(), Acc(total.size(), 0.0),
          [&](std::size_t i, Acc& acc) {
            const std::size_t pos = positions[i];
            const std::size_t r = rows_[pos];
            const double* vals = d_.values.data() + d_.row_ptr[r] + t.slab_off;
            const double resid = (d_.is_data[r] ? 1.0 : 0.0) - sig_[pos];
            for (int k = 0; k < size; ++k) {
              acc[static_cast<std::size_t>(k)] += vals[k] * resid;
            }
          },
          [](Acc& a, Acc& b) {
            for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
          });
      for (std::size_t k = 0; k < total.size(); ++k) total[k] += part[k];
    }
    return total;
  }

  void apply_delta(int g, std::span<const double> delta) {
    const GroupInfo& gi = d_.layout.groups[static_cast<std::size_t>(g)];
    for (int k = 0; k < gi.size; ++k) {
      theta_[static_cast<std::size_t>(gi.offset + k)] += delta[static_cast<std::size_t>(k)];
    }
    for (const Touch& t : touch_[static_cast<std::size_t>(g)]) {
      const auto& positions = class_rows_[static_cast<std::size_t>(t.cls)];
      auto update = [&](std::size_t i) {
        const std::size_t pos = positions[i];
        const std::size_t r = rows_[pos];
        const double* vals = d_.values.data() + d_.row_ptr[r] + t.slab_off;
        double dot = 0.0;
        for (int k = 0; k < gi.size; ++k) dot += vals[k] * delta[static_cast<std::size_t>(k)];
        lin_[pos] += dot;
        sig_[pos] = sigmoid(lin_[pos] + d_.offset[r]);
      };
      if (positions.size() < 8192) {
        for (std::size_t i = 0; i < positions.size(); ++i) update(i);
      } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0;
             i < static_cast<std::ptrdiff_t>(positions.size()); ++i) {
          update(static_cast<std::size_t>(i));
        }
      }
    }
  }

  // Exact Newton step on an unpenalized block with step halving.
  void newton_block_step(int g, std::vector<double> grad) {
    const GroupInfo& gi = d_.layout.groups[static_cast<std::size_t>(g)];
    weight_buf_.resize(rows_.size());
    for (const Touch& t : touch_[static_cast<std::size_t>(g)]) {
      for (std::size_t pos : class_rows_[static_cast<std::size_t>(t.cls)]) {
        weight_buf_[pos] = sig_[pos] * (1.0 - sig_[pos]);
      }
    }
    std::vector<double> hess = group_gram(g, &weight_buf_);
    double trace = 0.0;
    for (int i = 0; i < gi.size; ++i) trace += hess[i * gi.size + i];
    const double ridge = 1e-12 * (1.0 + trace / gi.size);
    for (int i = 0; i < gi.size; ++i) hess[i * gi.size + i] += ridge;
    if (!cholesky(hess, gi.size)) {
      // Fall back to the majorized step.
      cholesky_solve(chol_[static_cast<std::size_t>(g)], gi.size, grad);
      apply_delta(g, grad);
      return;
    }
    std::vector<double> step_dir = grad;
    cholesky_solve(hess, gi.size, step_dir);
    clamp_step(step_dir);
    double predicted = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      predicted += grad[k] * step_dir[k];
    }
    const double before = loglik();
    apply_delta(g, step_dir);
    // Line-search only when the predicted gain is resolvable; tiny
    // refinement steps would otherwise be rejected on rounding noise.
    if (predicted <= 1e-9 * (1.0 + std::abs(before))) return;
    double step = 1.0;
    for (int half = 0; half < 30 && loglik() < before; ++half) {
      step *= 0.5;
      std::vector<double> back(step_dir.size());
      for (std::size_t k = 0; k < step_dir.size(); ++k) {
        back[k] = -step * step_dir[k];
      }
      apply_delta(g, back);
    }
  }

  static void clamp_step(std::vector<double>& step) {
    double worst = 0.0;
    for (double v : step) worst = std::max(worst, std::abs(v));
    if (worst > kNewtonStepCap) {
      const double scale = kNewtonStepCap / worst;
      for (double& v : step) v *= scale;
    }
  }

  // Log-likelihood contribution of the rows that carry group g; theta
  // changes confined to g leave every other row untouched, so line searches
  // can compare this slice alone.
  double partial_loglik(int g) {
    double s = 0.0;
    for (const Touch& t : touch_[static_cast<std::size_t>(g)]) {
      for (std::size_t pos : class_rows_[static_cast<std::size_t>(t.cls)]) {
        const std::size_t r = rows_[pos];
        const double eta = lin_[pos] + d_.offset[r];
        s += (d_.is_data[r] ? eta : 0.0) - log1pexp(eta);
      }
    }
    return s;
  }

  double partial_objective(int g, double gamma) {
    const GroupInfo& gi = d_.layout.groups[static_cast<std::size_t>(g)];
    double obj = partial_loglik(g);
    if (gi.penalized && gamma != 0.0) {
      obj -= gamma * group_weight(g) *
             norm2(std::span<const double>(theta_.data() + gi.offset,
                                           static_cast<std::size_t>(gi.size)));
    }
    return obj;
  }

  // Second-order step on a smooth block: the true Hessian of the rows plus,
  // for an active penalized group away from zero, the penalty curvature
  // (gamma w / |theta|)(I - u u^T). Backtracks on the partial objective and
  // reverts entirely if no ascent is found.
  double newton_refine(int g, double gamma) {
    const GroupInfo& gi = d_.layout.groups[static_cast<std::size_t>(g)];
    std::vector<double> grad = group_gradient(g);
    const std::span<double> th(theta_.data() + gi.offset,
                               static_cast<std::size_t>(gi.size));
    const double nrm = norm2(th);
    const double w = gi.penalized ? group_weight(g) : 0.0;
    std::vector<double> grad_pen = grad;
    if (gi.penalized && gamma != 0.0) {
      if (nrm == 0.0) return 0.0;
      for (int k = 0; k < gi.size; ++k) {
        grad_pen[static_cast<std::size_t>(k)] -=
            gamma * w * th[static_cast<std::size_t>(k)] / nrm;
      }
    }
    double gn = 0.0;
    for (double v : grad_pen) gn = std::max(gn, std::abs(v));
    if (gn <= kSkipGradTol) return 0.0;

    // Only positions in this group's classes are read by group_gram, so the
    // shared buffer needs no clearing between groups.
    weight_buf_.resize(rows_.size());
    for (const Touch& t : touch_[static_cast<std::size_t>(g)]) {
      for (std::size_t pos : class_rows_[static_cast<std::size_t>(t.cls)]) {
        weight_buf_[pos] = sig_[pos] * (1.0 - sig_[pos]);
      }
    }
    std::vector<double> hess = group_gram(g, &weight_buf_);
    if (hess.empty()) return 0.0;
    if (gi.penalized && gamma != 0.0) {
      const double s = gamma * w / nrm;
      for (int a = 0; a < gi.size; ++a) {
        for (int b = 0; b < gi.size; ++b) {
          const double uu = th[static_cast<std::size_t>(a)] *
                            th[static_cast<std::size_t>(b)] / (nrm * nrm);
          hess[static_cast<std::size_t>(a) * gi.size + b] +=
              s * ((a == b ? 1.0 : 0.0) - uu);
        }
      }
    }
    double trace = 0.0;
    for (int i = 0; i < gi.size; ++i) trace += hess[i * gi.size + i];
    const double ridge = 1e-12 * (1.0 + trace / gi.size);
    for (int i = 0; i < gi.size; ++i) hess[i * gi.size + i] += ridge;
    if (!cholesky(hess, gi.size)) return 0.0;
    std::vector<double> step = grad_pen;
    cholesky_solve(hess, gi.size, step);
    clamp_step(step);

    const double before = partial_objective(g, gamma);
    double predicted = 0.0;
    double step_norm = 0.0;
    for (std::size_t k = 0; k < step.size(); ++k) {
      predicted += grad_pen[k] * step[k];
      step_norm = std::max(step_norm, std::abs(step[k]));
    }
    apply_delta(g, step);
    if (predicted <= 1e-9 * (1.0 + std::abs(before))) return step_norm;
    double applied = 1.0;
    for (int half = 0; half < 8 && partial_objective(g, gamma) < before;
         ++half) {
      std::vector<double> back(step.size());
      for (std::size_t k = 0; k < step.size(); ++k) {
        back[k] = -0.5 * applied * step[k];
      }
      apply_delta(g, back);
      applied *= 0.5;
    }
    if (partial_objective(g, gamma) < before) {
      std::vector<double> back(step.size());
      for (std::size_t k = 0; k < step.size(); ++k) back[k] = -applied * step[k];
      apply_delta(g, back);
      applied = 0.0;
    }
    return applied * step_norm;
  }

  // One pass over the groups; with `active_only` the penalized groups that
  // sit at zero are skipped (activation happens on full sweeps). Returns the
  // largest coordinate change applied.
  double sweep(double gamma, const std::vector<std::uint8_t>& frozen,
               bool active_only) {
    const auto& groups = d_.layout.groups;
    std::vector<double> delta;
    double moved = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const GroupInfo& gi = groups[g];
      if (gi.size == 0 || touch_[g].empty()) continue;
      if (!frozen.empty() && frozen[g]) continue;
      if (!gi.penalized) {
        moved = std::max(moved, newton_refine(static_cast<int>(g), 0.0));
        continue;
      }
      if (active_only) {
        bool at_zero = true;
        for (int k = 0; k < gi.size; ++k) {
          at_zero = at_zero && theta_[static_cast<std::size_t>(gi.offset + k)] == 0.0;
        }
        if (at_zero) continue;
      }
      std::vector<double> grad = group_gradient(static_cast<int>(g));
      const double v = vmaj_[g];
      if (v <= 0.0) continue;
      delta.resize(static_cast<std::size_t>(gi.size));
      double nz = 0.0;
      for (int k = 0; k < gi.size; ++k) {
        const double z =
            theta_[static_cast<std::size_t>(gi.offset + k)] + grad[static_cast<std::size_t>(k)] / v;
        delta[static_cast<std::size_t>(k)] = z;
        nz += z * z;
      }
      nz = std::sqrt(nz);
      const double thr = gamma * group_weight(static_cast<int>(g)) / v;
      double scale = 0.0;
      if (nz > thr) {
        scale = 1.0 - thr / nz;
        if (scale < kSnapScale) scale = 0.0;
      }
      double max_change = 0.0;
      for (int k = 0; k < gi.size; ++k) {
        const double target = scale * delta[static_cast<std::size_t>(k)];
        delta[static_cast<std::size_t>(k)] =
            target - theta_[static_cast<std::size_t>(gi.offset + k)];
        max_change = std::max(max_change, std::abs(delta[static_cast<std::size_t>(k)]));
      }
      if (max_change > 1e-14 * (1.0 + std::abs(scale) * nz)) {
        apply_delta(static_cast<int>(g), delta);
        moved = std::max(moved, max_change);
      }
      // The majorized threshold step decides activation; a Newton step with
      // the penalty curvature sharpens the tail convergence.
      if (scale > 0.0) {
        moved = std::max(moved, newton_refine(static_cast<int>(g), gamma));
      }
    }
    return moved;
  }

  double objective(double gamma) {
    double obj = loglik();
    const auto& groups = d_.layout.groups;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (!groups[g].penalized || groups[g].size == 0) continue;
      obj -= gamma * group_weight(static_cast<int>(g)) *
             norm2(std::span<const double>(theta_.data() + groups[g].offset,
                                           static_cast<std::size_t>(groups[g].size)));
    }
    return obj;
  }

  double kkt_violation(double gamma, const std::vector<std::uint8_t>& frozen) {
    const auto& groups = d_.layout.groups;
    double worst = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const GroupInfo& gi = groups[g];
      if (gi.size == 0 || touch_[g].empty()) continue;
      if (!frozen.empty() && frozen[g]) continue;
      const std::vector<double> grad = group_gradient(static_cast<int>(g));
      if (!gi.penalized) {
        for (double v : grad) worst = std::max(worst, std::abs(v));
        continue;
      }
      const double w = group_weight(static_cast<int>(g));
      const std::span<const double> th(theta_.data() + gi.offset,
                                       static_cast<std::size_t>(gi.size));
      const double nrm = norm2(th);
      if (nrm > 0.0) {
        for (int k = 0; k < gi.size; ++k) {
          worst = std::max(worst,
                           std::abs(grad[static_cast<std::size_t>(k)] -
                                    gamma * w * th[static_cast<std::size_t>(k)] / nrm));
        }
      } else {
        worst = std::max(
            worst, std::max(0.0, norm2(grad) - gamma * w));
      }
    }
    return worst;
  }

  const DesignData& d_;
  SolverOptions opts_;
  std::vector<std::size_t> rows_;
  std::vector<std::vector<std::size_t>> class_rows_;
  struct Touch {
    int cls;
    int slab_off;
  };
  std::vector<std::vector<Touch>> touch_;
  std::vector<double> vmaj_;
  std::vector<std::vector<double>> chol_;
  std::vector<double> theta_;
  std::vector<double> lin_;
  std::vector<double> sig_;
  std::vector<double> weight_buf_;
};

std::vector<std::uint8_t> freeze_all_penalized(const GroupLayout& layout) {
  std::vector<std::uint8_t> frozen(layout.groups.size(), 0);
  for (std::size_t g = 0; g < layout.groups.size(); ++g) {
    if (layout.groups[g].penalized) frozen[g] = 1;
  }
  return frozen;
}

void attach_aic(Fitter& fitter, const DesignData& design, FitResult& fit) {
  const auto& groups = design.layout.groups;
  std::vector<std::uint8_t> frozen(groups.size(), 0);
  bool any_active = false;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].penalized && !fit.active[g]) frozen[g] = 1;
    any_active = any_active || (groups[g].penalized && fit.active[g]);
  }
  double df = static_cast<double>(design.layout.unpenalized_dim());
  if (any_active) {
    const FitResult refit = fitter.fit(0.0, fit.theta, frozen);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (!groups[g].penalized || !fit.active[g]) continue;
      const GroupInfo& gi = groups[g];
      const double shrunk = norm2(std::span<const double>(
          fit.theta.data() + gi.offset, static_cast<std::size_t>(gi.size)));
      const double full = norm2(std::span<const double>(
          refit.theta.data() + gi.offset, static_cast<std::size_t>(gi.size)));
      const double ratio = full > 1e-12 ? shrunk / full : 1.0;
      df += 1.0 + (gi.size - 1) * ratio;
    }
  }
  fit.df = df;
  fit.aic = -2.0 * fit.loglik + 2.0 * df;
}

}  // namespace

double gamma_max(const DesignData& design, const SolverOptions& opts,
                 std::span<const std::size_t> rows, std::vector<double>* theta0) {
  Fitter fitter(design, rows, opts);
  const std::vector<double> theta = fitter.fit_unpenalized(kTightKkt);
  const std::vector<double> grad = fitter.gradient(theta);
  double gmax = 0.0;
  const auto& groups = design.layout.groups;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const GroupInfo& gi = groups[g];
    if (!gi.penalized || gi.size == 0) continue;
    const double gn = norm2(std::span<const double>(
        grad.data() + gi.offset, static_cast<std::size_t>(gi.size)));
    gmax = std::max(gmax, gn / std::pow(static_cast<double>(gi.size),
                                        opts.weight_exponent));
  }
  if (theta0) *theta0 = theta;
  return gmax;
}

std::vector<double> make_penalty_grid(double gamma_max, int size,
                                      double floor_ratio) {
  if (size < 1 || !(floor_ratio > 0.0) || floor_ratio >= 1.0) {
    throw std::invalid_argument("invalid penalty grid parameters");
  }
  if (!(gamma_max > 0.0)) return {0.0};
  if (size == 1) return {gamma_max};
  std::vector<double> grid(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    grid[static_cast<std::size_t>(i)] =
        gamma_max * std::pow(floor_ratio, static_cast<double>(i) / (size - 1));
  }
  return grid;
}

FitResult fit_single(const DesignData& design, double gamma,
                     const SolverOptions& opts,
                     std::span<const std::size_t> rows,
                     std::span<const double> theta_init) {
  Fitter fitter(design, rows, opts);
  std::vector<double> init(theta_init.begin(), theta_init.end());
  if (init.empty()) {
    init = fitter.fit_unpenalized(kTightKkt);
  }
  FitResult fit = fitter.fit(gamma, init, {});
  if (opts.compute_aic) attach_aic(fitter, design, fit);
  return fit;
}

PenaltyPath fit_path(const DesignData& design, std::span<const double> grid,
                     const SolverOptions& opts,
                     std::span<const std::size_t> rows) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] < grid[i - 1])) {
      throw std::invalid_argument("penalty grid must be strictly decreasing");
    }
  }
  PenaltyPath path;
  path.grid.assign(grid.begin(), grid.end());
  path.gamma_max = grid.empty() ? 0.0 : grid.front();
  Fitter fitter(design, rows, opts);
  std::vector<double> warm = fitter.fit_unpenalized(kTightKkt);
  for (double gamma : grid) {
    FitResult fit = fitter.fit(gamma, warm, {});
    warm = fit.theta;
    if (opts.compute_aic) attach_aic(fitter, design, fit);
    path.fits.push_back(std::move(fit));
  }
  return path;
}

double aic05_gamma(const PenaltyPath& path) {
  if (path.fits.empty()) throw std::invalid_argument("empty path");
  if (std::isnan(path.fits.front().aic)) {
    throw std::invalid_argument("path has no AIC values");
  }
  // Smallest gamma among exact AIC ties (grid is decreasing, so scan keeps
  // the last minimizer).
  std::size_t best = 0;
  for (std::size_t i = 1; i < path.fits.size(); ++i) {
    if (path.fits[i].aic <= path.fits[best].aic) best = i;
  }
  const double target = 0.5 * (path.grid[best] + path.gamma_max);
  std::size_t sel = 0;
  for (std::size_t i = 1; i < path.grid.size(); ++i) {
    if (std::abs(path.grid[i] - target) <
        std::abs(path.grid[sel] - target)) {
      sel = i;
    }
  }
  return path.grid[sel];
}

InteractionMatrix selected_groups(const FitResult& fit,
                                  const GroupLayout& layout) {
  InteractionMatrix m(layout.p);
  auto group_norm = [&](int g) {
    const GroupInfo& gi = layout.groups[static_cast<std::size_t>(g)];
    return norm2(std::span<const double>(fit.theta.data() + gi.offset,
                                         static_cast<std::size_t>(gi.size)));
  };
  for (int i = 1; i <= layout.p; ++i) {
    const int g = layout.intra_group(i);
    m.ind(i, i) = fit.active[static_cast<std::size_t>(g)];
    m.score_at(i, i) = group_norm(g);
    for (int j = i + 1; j <= layout.p; ++j) {
      const int gij = layout.inter_group(i, j);
      m.ind(i, j) = m.ind(j, i) = fit.active[static_cast<std::size_t>(gij)];
      m.score_at(i, j) = m.score_at(j, i) = group_norm(gij);
    }
  }
  return m;
}

}  // namespace mgibbs
