#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace mgibbs {

// Deterministic counter-seeded generator with named substreams.
//
// Every parallel task (a simulated replicate, a CV fold, one null simulation
// of an MC test) derives its own stream from the run seed and its task
// coordinates, so results never depend on thread count or scheduling.
// Distributions are implemented here rather than taken from <random> because
// libstdc++'s are unspecified and would tie file-level reproducibility to a
// library version.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(mix(seed ^ kPhi)) {}

  // Derived stream for a named subtask; independent for distinct tags.
  RngStream substream(std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) const {
    std::uint64_t s = state_;
    s = mix(s ^ mix(a + 0x9e3779b97f4a7c15ULL));
    s = mix(s ^ mix(b + 0xbf58476d1ce4e5b9ULL));
    s = mix(s ^ mix(c + 0x94d049bb133111ebULL));
    return RngStream(FromState{}, s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal (polar Box-Muller, no carried state).
  double normal();

  int poisson(double mean);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  struct FromState {};
  RngStream(FromState, std::uint64_t s) : state_(s) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  static constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

}  // namespace mgibbs
