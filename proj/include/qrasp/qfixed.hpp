#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace qrasp {

// Unsigned fixed-point value with IntBits integer and FracBits fractional bits.
template <int IntBits, int FracBits>
class FixedPoint {
  static_assert(IntBits + FracBits <= 16, "raw value is stored in 16 bits");

 public:
  static constexpr int kIntBits = IntBits;
  static constexpr int kFracBits = FracBits;
  static constexpr int kTotalBits = IntBits + FracBits;
  static constexpr std::uint16_t kMaxRaw = static_cast<std::uint16_t>((1u << kTotalBits) - 1);
  static constexpr double kStep = 1.0 / static_cast<double>(1u << FracBits);
  static constexpr double kMax = kMaxRaw * kStep;

  constexpr FixedPoint() = default;

  static constexpr FixedPoint from_raw(std::uint16_t raw) {
    FixedPoint q;
    q.raw_ = raw > kMaxRaw ? kMaxRaw : raw;
    return q;
  }

  // Round to the nearest step (ties up); negatives clamp to 0, overflow
  // saturates at kMax.
  static FixedPoint quantize(double v) {
    if (!(v > 0.0)) return FixedPoint{};
    const double scaled = std::floor(v / kStep + 0.5);
    if (scaled >= static_cast<double>(kMaxRaw)) return from_raw(kMaxRaw);
    return from_raw(static_cast<std::uint16_t>(scaled));
  }

  constexpr std::uint16_t raw() const { return raw_; }
  constexpr double value() const { return raw_ * kStep; }

  constexpr auto operator<=>(const FixedPoint&) const = default;

 private:
  std::uint16_t raw_ = 0;
};

// 6.4 format used by the contention-cost policy.
using QFixed = FixedPoint<6, 4>;
// 12.4 format for latency-valued costs.
using QWide = FixedPoint<12, 4>;

inline QFixed quantize(double v) { return QFixed::quantize(v); }

// One Q-learning step: (1 - alpha) * old + alpha * (cost + gamma * downstream_min),
// quantized once at the end.
template <class Q>
Q q_update(Q old, double alpha, double cost, double gamma, Q downstream_min) {
  const double next =
      (1.0 - alpha) * old.value() + alpha * (cost + gamma * downstream_min.value());
  return Q::quantize(next);
}

}  // namespace qrasp
