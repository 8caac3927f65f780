#pragma once

#include "gemn/energy/dce.hpp"

namespace gemn::eddc {

// Slot-level fluid model of one isolated router under a constant offered
// load. Used for battery-life sweeps where packet-level simulation of days
// of flood traffic is impractical. Traffic is served at the link rate while
// busy (drawing the calibrated active current). A managed node spends idle
// time in clock-stop at the sleep current; an unmanaged node idles at the
// normal-mode board current. Harvest is not modelled.
struct FluidNodeConfig {
  double capacity_mAh = energy::defaults::kCapacityMah;
  double initial_fraction = 1.0;
  double efficiency = energy::defaults::kDischargeEfficiency;
  double busy_current_mA = energy::defaults::kIActiveEffectiveMa;
  double sleep_current_mA = energy::defaults::kISleepMa;
  double unmanaged_idle_current_mA = energy::defaults::kIProcMa;
  double link_rate_mbps = energy::defaults::kLinkRateMbps;
  double buffer_bits = 16e6;
  energy::DutyPlan plan;
  double max_hours = 10000.0;
};

struct LifeResult {
  double hours = 0.0;
  bool depleted = false;
  double served_mbit = 0.0;
  double dropped_mbit = 0.0;
  double average_drain_mA = 0.0;
};

// Hours until the battery is empty. Managed nodes follow the plan's
// sleep/active split; unmanaged nodes never slot-sleep.
LifeResult battery_life_under_load(const FluidNodeConfig& config, double offered_mbps, bool managed);

}  // namespace gemn::eddc
