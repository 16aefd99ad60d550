#pragma once

#include <cmath>
#include <cstdint>

namespace glab {

// Counter-based generator: output i of stream s is mix(key(seed, s) + i * phi).
// A fixed (seed, stream, counter) triple always yields the same value, so
// trajectories are reproducible and workers can draw from disjoint streams.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), key_(mix(mix(seed + kPhi) ^ mix(stream + kGamma))), counter_(0) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }

  result_type operator()() { return mix(key_ + (++counter_) * kPhi); }

  // Uniform in [0, 1).
  double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1} by rejection.
  int below(int n) {
    const std::uint64_t bound = max() - max() % std::uint64_t(n);
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= bound);
    return int(x % std::uint64_t(n));
  }

  // Standard normal via Box-Muller (two counter draws per call).
  double normal() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Independent stream derived from the same master seed.
  CounterRng split(std::uint64_t stream) const { return CounterRng(seed_, stream); }

  std::uint64_t seed() const { return seed_; }

 private:
  static constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kGamma = 0xBF58476D1CE4E5B9ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace glab
