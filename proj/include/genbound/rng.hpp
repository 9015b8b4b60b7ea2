#pragma once

#include <cmath>
#include <cstdint>

namespace genbound {

// Counter-based splittable generator. A stream is named by the triple
// (seed, trial, stream); every draw is a pure function of that key and a
// running counter, so parallel and serial executions of a trial loop see
// identical values regardless of scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t trial = 0,
                      std::uint64_t stream = 0)
      : state_(mix(mix(mix(seed ^ 0x8a5cd789635d2dffULL) + trial) + stream)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + uniform01() * (b - a); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller; consumes two words per call, no cached spare.
  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Unbiased integer in [0, k), k >= 1.
  std::uint64_t uniform_int(std::uint64_t k) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % k;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % k;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace genbound
