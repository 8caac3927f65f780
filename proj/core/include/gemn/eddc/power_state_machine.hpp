#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "gemn/energy/dce.hpp"
#include "gemn/sim/time.hpp"

namespace gemn::eddc {

using sim::SimTime;

enum class PowerState { kActive, kClockStop, kSlotSleep, kDepleted };
std::string_view to_string(PowerState s);

enum class ChargeCategory { kTx, kRx, kProc, kSleep, kClockStop, kIdle };

// Charge bookkeeping for one node. Per-category values are load-side charge;
// `drawn_mAh` is what left the cell after discharge efficiency.
struct EnergyLedger {
  double tx_mAh = 0.0;
  double rx_mAh = 0.0;
  double proc_mAh = 0.0;
  double sleep_mAh = 0.0;
  double clock_stop_mAh = 0.0;
  double idle_mAh = 0.0;  // unmanaged nodes idle at the normal-mode current
  double drawn_mAh = 0.0;
  double harvested_mAh = 0.0;
  double spilled_mAh = 0.0;
  double unmet_mAh = 0.0;
  double initial_mAh = 0.0;
  double stored_mAh = 0.0;
  double capacity_mAh = 0.0;

  [[nodiscard]] double load_mAh() const { return tx_mAh + rx_mAh + proc_mAh + sleep_mAh + clock_stop_mAh + idle_mAh; }
  // |stored - (initial - drawn + harvested - spilled + unmet)| / capacity
  [[nodiscard]] double identity_residual() const;

  // Applies one accounting step: stored' = clamp(stored - draw + harvest, 0, capacity).
  void apply_step(double draw_mAh, double harvest_mAh);
};

// Charge for `duration` in one state at the profile's current (mAh).
double account(PowerState state, SimTime duration, const energy::CurrentProfile& profile);
double charge_mAh(double current_mA, SimTime duration);

// Per-packet service floor: the stricter of the byte-rate and packet-rate limits.
SimTime service_time(double bits, double processing_rate_mbps, double packets_per_sec);

struct NicRecord {
  std::uint32_t packet = 0;
  std::uint32_t bytes = 0;
};

// FIFO packet buffer of the WLAN NIC with tail drop.
class NicBuffer {
 public:
  explicit NicBuffer(std::uint64_t capacity_bytes = 2'000'000) : capacity_{capacity_bytes} {}

  // Returns false (and counts a drop) when the record does not fit.
  bool push(NicRecord rec);
  std::optional<NicRecord> pop();
  [[nodiscard]] const NicRecord* front() const { return queue_.empty() ? nullptr : &queue_.front(); }
  [[nodiscard]] bool empty() const { return queue_.empty(); }
  [[nodiscard]] std::size_t size() const { return queue_.size(); }
  [[nodiscard]] std::uint64_t occupancy_bytes() const { return used_; }
  [[nodiscard]] std::uint64_t capacity_bytes() const { return capacity_; }
  [[nodiscard]] std::uint64_t drops() const { return drops_; }
  // Empties the buffer, returning what it held (e.g. on power loss).
  std::vector<NicRecord> clear();

 private:
  std::deque<NicRecord> queue_;
  std::uint64_t capacity_;
  std::uint64_t used_ = 0;
  std::uint64_t drops_ = 0;
};

// Continuous solar charging over each day's effective charging window,
// centred on local noon. Simulation time zero is `start_hour` of day 0.
struct HarvestProfile {
  int panels = 0;
  energy::SolarPanelModel panel;
  std::vector<energy::Weather> weather{energy::Weather::kSunny};
  double start_hour = 0.0;

  [[nodiscard]] energy::Weather weather_on_day(std::int64_t day) const;
  [[nodiscard]] double current_mA(double hour_of_day, energy::Weather w) const;
  // Harvested charge over [a, b] in mAh.
  [[nodiscard]] double between(SimTime a, SimTime b) const;
};

struct NodeEnergyConfig {
  energy::CurrentProfile currents;
  double capacity_mAh = energy::defaults::kCapacityMah;
  double efficiency = energy::defaults::kDischargeEfficiency;
  double restart_fraction = 0.05;
  SimTime wake_latency = SimTime::from_us(10);
  bool managed = true;
  HarvestProfile harvest;
};

enum class ArrivalAction { kDropped, kBufferedAsleep, kWake, kQueued };

struct TimeInState {
  SimTime slot_sleep;
  SimTime clock_stop;
  SimTime busy;
  SimTime idle;  // unmanaged idle
  SimTime depleted;
};

// Event-driven duty cycling for one router: fixed sleep at the start of each
// slot, clock-stop micro-sleeps whenever the active window is idle, and exact
// charge accounting between events.
class PowerStateMachine {
 public:
  PowerStateMachine(NodeEnergyConfig config, double initial_fraction);

  void set_plan(const energy::DutyPlan& plan);
  [[nodiscard]] const energy::DutyPlan& plan() const { return plan_; }

  struct SlotWindow {
    SimTime sleep_until;
    SimTime active_until;
  };
  // Starts a slot at `t`. Managed nodes sleep for the planned ASP first.
  SlotWindow begin_slot(SimTime t);
  // End of the slot sleep: the node enters the active window idle.
  void wake(SimTime t);

  // Integrates state currents and harvest up to `now`.
  void advance(SimTime now);

  ArrivalAction on_packet_arrival(SimTime now, NicBuffer& buffer, NicRecord rec);

  [[nodiscard]] bool can_serve(SimTime now) const;
  // Starts serving one packet if it completes inside the active window;
  // returns the completion time.
  std::optional<SimTime> start_service(SimTime now, SimTime proc, SimTime tx);
  void finish_service(SimTime now);
  [[nodiscard]] bool busy() const { return busy_; }
  [[nodiscard]] SimTime active_until() const { return active_until_; }
  [[nodiscard]] SimTime slot_duration() const;

  // Lump charge for activity outside the state timeline (NIC receive,
  // control-plane transmissions).
  void charge(ChargeCategory category, double load_mAh);

  // Leaves Depleted once stored charge is back above the restart threshold.
  bool try_restart(SimTime now);
  // True once per transition into Depleted.
  bool take_depletion_flag();

  [[nodiscard]] PowerState state() const;
  [[nodiscard]] const EnergyLedger& ledger() const { return ledger_; }
  [[nodiscard]] double stored_mAh() const { return ledger_.stored_mAh; }
  [[nodiscard]] double residual_fraction() const { return ledger_.stored_mAh / ledger_.capacity_mAh; }
  [[nodiscard]] const TimeInState& time_in_state() const { return time_; }
  [[nodiscard]] const NodeEnergyConfig& config() const { return config_; }
  [[nodiscard]] SimTime last_update() const { return last_; }

 private:
  enum class Phase { kSleep, kIdle, kBusy, kDepleted };

  void integrate(SimTime from, SimTime to, double& draw_load, double& draw_battery);
  void add_category(ChargeCategory c, double load);

  NodeEnergyConfig config_;
  energy::DutyPlan plan_;
  EnergyLedger ledger_;
  TimeInState time_;
  Phase phase_ = Phase::kIdle;
  SimTime last_;
  SimTime sleep_until_;
  SimTime active_until_ = SimTime::max();
  bool busy_ = false;
  SimTime service_start_;
  SimTime proc_end_;
  SimTime tx_end_;
  bool depleted_flag_ = false;
};

}  // namespace gemn::eddc
