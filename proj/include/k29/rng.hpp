#pragma once

#include <cstdint>

namespace k29 {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over the <random> engines
// because its output is fully specified, so seeded experiments reproduce
// bit-for-bit across standard libraries and builds.
//
// Stream discipline: label sources consume exactly one next_unit() per
// label, in round order; deterministic sources consume nothing.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // One draw per label: 1 with probability theta.
  int next_bernoulli(double theta) { return next_unit() < theta ? 1 : 0; }

 private:
  std::uint64_t state_;
};

// Decorrelated per-stream seed for fan-out work (Monte Carlo runs, duels).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  SplitMix64 g(master ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  return g.next_u64();
}

}  // namespace k29
