#pragma once

#include <cstdint>

namespace qrasp {

// Counter-based stream: the n-th draw is a pure function of (seed, stream, n),
// so every (node, purpose) pair replays independently of all others.
class Rng {
 public:
  enum class Purpose : std::uint64_t { Injection = 1, Destination = 2, Exploration = 3 };

  Rng() = default;
  Rng(std::uint64_t seed, std::uint64_t node, Purpose purpose)
      : key_(mix(seed ^ mix(node * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(purpose)))) {}

  std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound > 0. Rejection keeps it unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  bool bernoulli(double p) { return p > 0.0 && next_double() < p; }

  std::uint64_t draws() const { return counter_; }

 private:
  // SplitMix64 finaliser.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace qrasp
