#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mgibbs {

// Deterministic parallel reduction over [0, n) in fixed blocks.
//
// Partials are computed per block (sequentially, in index order within the
// block) and combined by a fixed pairwise tree over block indices. The tree
// depends only on n and kBlock, never on the thread count, so floating-point
// results are bit-identical for any worker-pool size. All reductions whose
// results reach an output file must go through here.
inline constexpr std::size_t kReduceBlock = 2048;

// AccumFn: void(std::size_t i, Acc& acc). CombineFn: void(Acc& into, Acc&).
// Small inputs run serially over the same block tree, so results are
// bit-identical whichever branch executes.
template <class Acc, class AccumFn, class CombineFn>
Acc det_reduce(std::size_t n, const Acc& zero, AccumFn&& accum,
               CombineFn&& combine) {
  if (n == 0) return zero;
  const std::size_t n_blocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<Acc> partials(n_blocks, zero);
  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * kReduceBlock;
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    Acc local = zero;
    for (std::size_t i = lo; i < hi; ++i) accum(i, local);
    partials[b] = std::move(local);
  };
  if (n_blocks <= 4) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(n_blocks); ++b) {
      run_block(static_cast<std::size_t>(b));
    }
  }
  // Pairwise tree, adjacent blocks first.
  for (std::size_t stride = 1; stride < n_blocks; stride *= 2) {
    for (std::size_t i = 0; i + stride < n_blocks; i += 2 * stride) {
      combine(partials[i], partials[i + stride]);
    }
  }
  return std::move(partials[0]);
}

template <class AccumFn>
double det_sum(std::size_t n, AccumFn&& term) {
  return det_reduce<double>(
      n, 0.0, [&](std::size_t i, double& acc) { acc += term(i); },
      [](double& a, double& b) { a += b; });
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace mgibbs
