#include "gemn/sim/time.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gemn::sim {

SimTime SimTime::from_seconds(double seconds) {
  if (!std::isfinite(seconds) || seconds < 0.0) {
    throw std::invalid_argument("SimTime must be a finite nonnegative number of seconds");
  }
  return SimTime{static_cast<rep>(std::llround(seconds * static_cast<double>(kTicksPerSecond)))};
}

SimTime duration_for_bits(double bits, double rate_mbps) {
  if (rate_mbps <= 0.0) throw std::invalid_argument("rate must be positive");
  // bits / (rate * 1e6) seconds == bits * 1000 / rate nanoseconds
  return SimTime::from_ns(static_cast<SimTime::rep>(std::llround(bits * 1000.0 / rate_mbps)));
}

std::string to_string(SimTime t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9f", t.seconds());
  return buf;
}

}  // namespace gemn::sim
