#pragma once

#include <cstdint>

namespace vidaug {

/// Deterministic 64-bit generator (SplitMix64). All randomness in the
/// library flows through this type so that a fixed seed reproduces the
/// exact same byte-level outputs on every platform. The standard-library
/// distributions are deliberately avoided: their output is not specified
/// across implementations.
///
/// Instances are cheap to copy but must not be shared across threads.
/// Batch operations derive one generator per work item via derive_seed().
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : seed_(seed), state_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 usable bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform_real(double lo, double hi) {
    return lo + next_double() * (hi - lo);
  }

  /// Uniform integer in [0, n). Unbiased via rejection of the short
  /// final stripe of the 64-bit range. Requires n >= 1.
  uint64_t uniform_int(uint64_t n) {
    const uint64_t threshold = (0ull - n) % n;  // (2^64 - n) mod n
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return next_double() < p; }

  /// +1 or -1 with equal probability.
  int sign() { return (next_u64() & 1ull) ? 1 : -1; }

 private:
  uint64_t seed_;
  uint64_t state_;
};

/// Sub-seed derivation for per-item generators inside batch operations:
/// item i uses derive_seed(base, i). XOR keeps the contract trivially
/// reproducible; SplitMix64's output mixing decorrelates the streams.
inline uint64_t derive_seed(uint64_t base, uint64_t salt) { return base ^ salt; }

}  // namespace vidaug
