#include "gemn/eddc/fluid.hpp"

#include <algorithm>
#include <stdexcept>

namespace gemn::eddc {

LifeResult battery_life_under_load(const FluidNodeConfig& cfg, double offered_mbps, bool managed) {
  if (offered_mbps < 0.0) throw std::invalid_argument("offered load must be nonnegative");
  if (!(cfg.link_rate_mbps > 0.0) || !(cfg.plan.slot_s > 0.0)) {
    throw std::invalid_argument("link rate and slot must be positive");
  }
  const double slot = cfg.plan.slot_s;
  const double sleep = managed ? std::clamp(cfg.plan.asp_s, 0.0, slot) : 0.0;
  const double active = slot - sleep;
  const double link = cfg.link_rate_mbps * 1e6;
  const double load = offered_mbps * 1e6;

  // Usable charge seen from the load side (mA*s).
  double remaining = cfg.capacity_mAh * cfg.initial_fraction * cfg.efficiency * 3600.0;
  double backlog = 0.0;
  double t = 0.0;
  LifeResult result;
  const double limit = cfg.max_hours * 3600.0;

  while (t < limit) {
    // Sleep phase: arrivals are buffered.
    double arrivals = load * sleep;
    double kept = std::min(backlog + arrivals, cfg.buffer_bits);
    result.dropped_mbit += (backlog + arrivals - kept) / 1e6;
    backlog = kept;

    // Active phase: serve backlog plus fresh arrivals at the link rate.
    const double work = backlog + load * active;
    const double served = std::min(work, link * active);
    const double busy = served / link;
    const double idle = active - busy;

    // Drain in order: sleep, busy, idle; find the exact crossing if the
    // battery empties inside this slot.
    const double idle_current = managed ? cfg.sleep_current_mA : cfg.unmanaged_idle_current_mA;
    const double phases[3][2] = {{sleep, cfg.sleep_current_mA}, {busy, cfg.busy_current_mA}, {idle, idle_current}};
    for (const auto& [duration, current] : phases) {
      const double need = duration * current;
      if (need >= remaining && current > 0.0) {
        const double used = remaining / current;
        t += used;
        result.hours = t / 3600.0;
        result.depleted = true;
        result.average_drain_mA = cfg.capacity_mAh * cfg.initial_fraction * cfg.efficiency * 3600.0 / t;
        return result;
      }
      remaining -= need;
      t += duration;
    }
    result.served_mbit += served / 1e6;
    const double left = work - served;
    result.dropped_mbit += std::max(0.0, left - cfg.buffer_bits) / 1e6;
    backlog = std::min(left, cfg.buffer_bits);
  }
  result.hours = t / 3600.0;
  const double used = cfg.capacity_mAh * cfg.initial_fraction * cfg.efficiency * 3600.0 - remaining;
  result.average_drain_mA = t > 0.0 ? used / t : 0.0;
  return result;
}

}  // namespace gemn::eddc
