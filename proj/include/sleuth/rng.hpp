#pragma once

#include <cstdint>

namespace sleuth {

// SplitMix64 step. Used both as the core generator and as a seed mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Small deterministic RNG with cheap stream splitting.
///
/// Streams derived with stream(tag) depend only on (seed, tag), never on how
/// many draws other streams made, so work items can be farmed out to any
/// number of workers and still reproduce bit-identical results.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // decorrelate trivially related seeds (0, 1, 2, ...)
    std::uint64_t s = state_;
    state_ = splitmix64(s) ^ 0x6a09e667f3bcc909ull;
  }

  /// Derive an independent child stream for the given tag.
  Rng stream(std::uint64_t tag) const {
    std::uint64_t s = state_ + 0x9e3779b97f4a7c15ull * (tag + 1);
    return Rng(splitmix64(s));
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform double strictly inside (0, 1).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Uniform integer in [0, n), n >= 1. Rejection sampling keeps it unbiased.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t state_;
};

}  // namespace sleuth
