#include "mgibbs/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mgibbs {

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  // Rejection to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t u;
  do {
    u = next_u64();
  } while (u >= limit);
  return u % n;
}

double RngStream::normal() {
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

int RngStream::poisson(double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  // Knuth's product method below the exp-underflow range; larger means are
  // split using the additivity of independent Poisson counts.
  if (mean > 60.0) {
    const double half = mean / 2.0;
    return poisson(half) + poisson(mean - half);
  }
  const double l = std::exp(-mean);
  int k = 0;
  double prod = uniform();
  while (prod > l) {
    ++k;
    prod *= uniform();
  }
  return k;
}

}  // namespace mgibbs
