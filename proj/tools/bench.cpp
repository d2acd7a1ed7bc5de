// Micro-benchmark comparing the OpenMP kernels against the serial reference
// implementations they are tested against.
#include <chrono>
#include <cstdio>

#include "mgibbs/cross_k.hpp"
#include "mgibbs/design.hpp"
#include "mgibbs/logistic.hpp"
#include "mgibbs/parallel.hpp"
#include "mgibbs/reference.hpp"
#include "mgibbs/simulate.hpp"
#include "mgibbs/spatial_index.hpp"

using namespace mgibbs;

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now();
    fn();
    best = std::min(best, now() - t0);
  }
  return best;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", max_threads());
  RngStream rng(20240915);
  const Window w(0, 1000, 0, 500);
  const MultiTypePattern pattern =
      sim_binomial(w, {0, 2000, 2000, 1000, 3000}, rng);

  // Annulus counting: grid index vs brute-force scan.
  {
    const SpatialIndex index(pattern, 20.0);
    std::vector<Point> centers;
    for (int i = 0; i < 2000; ++i) {
      centers.push_back(Point{rng.uniform(0, 1000), rng.uniform(0, 500)});
    }
    volatile long sink = 0;
    const double fast = time_best_of(3, [&] {
      long s = 0;
      for (const Point& c : centers) s += index.count_annulus(c, 2, 5.0, 20.0);
      sink = s;
    });
    const double slow = time_best_of(3, [&] {
      long s = 0;
      for (const Point& c : centers) {
        s += reference::count_annulus(pattern, c, 2, 5.0, 20.0);
      }
      sink = s;
    });
    std::printf("annulus counts (2000 queries): indexed %.4fs  brute %.4fs  (%.1fx)\n",
                fast, slow, slow / fast);
  }

  // Design build + gradient: OpenMP rows vs the same code pinned serial is
  // not separable at runtime, so report absolute throughput instead.
  {
    ModelSpec spec = ModelSpec::shared_ranges(
        4, InteractionFamily::saturation, {5.0, 10.0, 20.0});
    spec.set_auto_saturations(pattern.counts_by_type(), w.area());
    const DummySet dummies =
        generate_dummies(w, pattern.counts_by_type(), DummySpec{}, rng);
    DesignData design;
    const double build = time_best_of(3, [&] {
      design = build_design(pattern, dummies, spec, {}, 20.0);
    });
    std::vector<double> theta(static_cast<std::size_t>(design.layout.dim), 0.01);
    std::vector<double> grad;
    const double gradient = time_best_of(5, [&] {
      grad = logistic_gradient(design, theta);
    });
    std::printf("design build (%zu rows): %.4fs;  gradient: %.4fs\n",
                design.row_count(), build, gradient);
  }

  // Cross-K: indexed cumulative binning vs brute-force double sum.
  {
    std::vector<double> grid;
    for (double r = 2.0; r <= 50.0; r += 2.0) grid.push_back(r);
    std::vector<double> fast_curve, slow_curve;
    const double fast =
        time_best_of(3, [&] { fast_curve = cross_k(pattern, 1, 2, grid); });
    const double slow = time_best_of(1, [&] {
      slow_curve = reference::cross_k(pattern, 1, 2, grid);
    });
    double max_err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      max_err = std::max(max_err, std::abs(fast_curve[i] - slow_curve[i]));
    }
    std::printf("cross-K: indexed %.4fs  brute %.4fs  (%.1fx, max |diff| %.2e)\n",
                fast, slow, slow / fast, max_err);
  }
  return 0;
}
