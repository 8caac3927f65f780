#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace gemn::sim {

// Fixed-point simulation clock in integer nanoseconds. A 512-bit frame at
// 18 Mbps lasts 28444 ns, so 28.44 us is representable exactly.
class SimTime {
 public:
  using rep = std::int64_t;
  static constexpr rep kTicksPerSecond = 1'000'000'000;
  static constexpr rep kTicksPerMicro = 1'000;

  constexpr SimTime() = default;

  static constexpr SimTime from_ns(rep ns) { return SimTime{ns}; }
  static constexpr SimTime from_us(rep us) { return SimTime{us * kTicksPerMicro}; }
  static constexpr SimTime from_whole_seconds(rep s) { return SimTime{s * kTicksPerSecond}; }
  // Rounds to the nearest tick; throws std::invalid_argument on negative or
  // non-finite input.
  static SimTime from_seconds(double seconds);
  static constexpr SimTime max() { return SimTime{INT64_MAX}; }

  [[nodiscard]] constexpr rep ns() const { return ns_; }
  [[nodiscard]] constexpr double seconds() const {
    return static_cast<double>(ns_) / static_cast<double>(kTicksPerSecond);
  }
  [[nodiscard]] constexpr double hours() const { return seconds() / 3600.0; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime& operator+=(SimTime d) {
    ns_ += d.ns_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.ns_ + b.ns_}; }
  // Saturates at zero; the clock never goes negative.
  friend constexpr SimTime operator-(SimTime a, SimTime b) {
    return SimTime{a.ns_ > b.ns_ ? a.ns_ - b.ns_ : 0};
  }
  friend constexpr SimTime operator*(SimTime a, rep k) { return SimTime{a.ns_ * k}; }

 private:
  constexpr explicit SimTime(rep ns) : ns_{ns} {}
  rep ns_ = 0;
};

// Transmission or service duration of `bits` at `rate_mbps`, rounded to the
// nearest tick.
SimTime duration_for_bits(double bits, double rate_mbps);

std::string to_string(SimTime t);

}  // namespace gemn::sim
