#include "gemn/eddc/power_state_machine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gemn::eddc {

std::string_view to_string(PowerState s) {
  switch (s) {
    case PowerState::kActive: return "active";
    case PowerState::kClockStop: return "clock_stop";
    case PowerState::kSlotSleep: return "slot_sleep";
    case PowerState::kDepleted: return "depleted";
  }
  return "unknown";
}

double EnergyLedger::identity_residual() const {
  const double expected = initial_mAh - drawn_mAh + harvested_mAh - spilled_mAh + unmet_mAh;
  return std::abs(stored_mAh - expected) / capacity_mAh;
}

void EnergyLedger::apply_step(double draw_mAh, double harvest_mAh) {
  const double raw = stored_mAh - draw_mAh + harvest_mAh;
  drawn_mAh += draw_mAh;
  harvested_mAh += harvest_mAh;
  if (raw > capacity_mAh) {
    spilled_mAh += raw - capacity_mAh;
    stored_mAh = capacity_mAh;
  } else if (raw < 0.0) {
    unmet_mAh += -raw;
    stored_mAh = 0.0;
  } else {
    stored_mAh = raw;
  }
}

double charge_mAh(double current_mA, SimTime duration) { return current_mA * duration.seconds() / 3600.0; }

double account(PowerState state, SimTime duration, const energy::CurrentProfile& profile) {
  switch (state) {
    case PowerState::kSlotSleep:
    case PowerState::kClockStop: return charge_mAh(profile.i_sleep_mA, duration);
    case PowerState::kActive: return charge_mAh(profile.i_proc_mA, duration);
    case PowerState::kDepleted: return 0.0;
  }
  return 0.0;
}

SimTime service_time(double bits, double processing_rate_mbps, double packets_per_sec) {
  if (!(processing_rate_mbps > 0.0) || !(packets_per_sec > 0.0)) {
    throw std::invalid_argument("processing limits must be positive");
  }
  const SimTime by_bits = sim::duration_for_bits(bits, processing_rate_mbps);
  const SimTime by_packets = SimTime::from_seconds(1.0 / packets_per_sec);
  return std::max(by_bits, by_packets);
}

bool NicBuffer::push(NicRecord rec) {
  if (used_ + rec.bytes > capacity_) {
    ++drops_;
    return false;
  }
  used_ += rec.bytes;
  queue_.push_back(rec);
  return true;
}

std::optional<NicRecord> NicBuffer::pop() {
  if (queue_.empty()) return std::nullopt;
  NicRecord rec = queue_.front();
  queue_.pop_front();
  used_ -= rec.bytes;
  return rec;
}

std::vector<NicRecord> NicBuffer::clear() {
  std::vector<NicRecord> out(queue_.begin(), queue_.end());
  queue_.clear();
  used_ = 0;
  return out;
}

energy::Weather HarvestProfile::weather_on_day(std::int64_t day) const {
  if (weather.empty()) return energy::Weather::kSunny;
  const auto idx = static_cast<std::size_t>(std::min<std::int64_t>(day, static_cast<std::int64_t>(weather.size()) - 1));
  return weather[idx];
}

double HarvestProfile::current_mA(double hour_of_day, energy::Weather w) const {
  const double h = panel.hours(w);
  if (hour_of_day < 12.0 - h / 2.0 || hour_of_day >= 12.0 + h / 2.0) return 0.0;
  return panels * panel.daily_yield(w) / h;
}

double HarvestProfile::between(SimTime a, SimTime b) const {
  if (panels <= 0 || b <= a) return 0.0;
  constexpr double kDay = 86400.0;
  const double from = start_hour * 3600.0 + a.seconds();
  const double to = start_hour * 3600.0 + b.seconds();
  double total = 0.0;
  const auto first_day = static_cast<std::int64_t>(std::floor(from / kDay));
  const auto last_day = static_cast<std::int64_t>(std::floor(to / kDay));
  for (std::int64_t d = first_day; d <= last_day; ++d) {
    const energy::Weather w = weather_on_day(d);
    const double h = panel.hours(w);
    const double lo = d * kDay + (12.0 - h / 2.0) * 3600.0;
    const double hi = d * kDay + (12.0 + h / 2.0) * 3600.0;
    const double overlap = std::min(hi, to) - std::max(lo, from);
    if (overlap > 0.0) total += panels * panel.daily_yield(w) / h * overlap / 3600.0;
  }
  return total;
}

PowerStateMachine::PowerStateMachine(NodeEnergyConfig config, double initial_fraction)
    : config_{std::move(config)} {
  if (!(initial_fraction >= 0.0 && initial_fraction <= 1.0)) {
    throw std::invalid_argument("initial residual fraction must lie in [0, 1]");
  }
  config_.currents.validate();
  ledger_.capacity_mAh = config_.capacity_mAh;
  ledger_.initial_mAh = config_.capacity_mAh * initial_fraction;
  ledger_.stored_mAh = ledger_.initial_mAh;
  if (ledger_.stored_mAh <= 0.0) phase_ = Phase::kDepleted;
}

void PowerStateMachine::set_plan(const energy::DutyPlan& plan) { plan_ = plan; }

SimTime PowerStateMachine::slot_duration() const { return SimTime::from_seconds(plan_.slot_s); }

PowerStateMachine::SlotWindow PowerStateMachine::begin_slot(SimTime t) {
  advance(t);
  if (phase_ == Phase::kDepleted) return {t, t};
  if (!config_.managed) {
    sleep_until_ = t;
    active_until_ = SimTime::max();
    if (phase_ == Phase::kSleep) phase_ = Phase::kIdle;
    return {t, active_until_};
  }
  const SimTime asp = SimTime::from_seconds(plan_.asp_s);
  sleep_until_ = t + asp;
  active_until_ = t + slot_duration();
  phase_ = asp > SimTime{} ? Phase::kSleep : Phase::kIdle;
  return {sleep_until_, active_until_};
}

void PowerStateMachine::wake(SimTime t) {
  advance(t);
  if (phase_ == Phase::kSleep && t >= sleep_until_) phase_ = Phase::kIdle;
}

void PowerStateMachine::add_category(ChargeCategory c, double load) {
  switch (c) {
    case ChargeCategory::kTx: ledger_.tx_mAh += load; break;
    case ChargeCategory::kRx: ledger_.rx_mAh += load; break;
    case ChargeCategory::kProc: ledger_.proc_mAh += load; break;
    case ChargeCategory::kSleep: ledger_.sleep_mAh += load; break;
    case ChargeCategory::kClockStop: ledger_.clock_stop_mAh += load; break;
    case ChargeCategory::kIdle: ledger_.idle_mAh += load; break;
  }
}

void PowerStateMachine::integrate(SimTime from, SimTime to, double& draw_load, double& draw_battery) {
  const auto& cur = config_.currents;
  auto segment = [&](SimTime a, SimTime b, double current, ChargeCategory cat, SimTime& counter) {
    if (b <= a) return;
    counter += b - a;
    const double q = charge_mAh(current, b - a);
    add_category(cat, q);
    draw_load += q;
  };
  if (phase_ == Phase::kDepleted) {
    time_.depleted += to - from;
    return;
  }
  SimTime cursor = from;
  if (busy_) {
    segment(cursor, std::min(to, proc_end_), cur.i_proc_mA, ChargeCategory::kProc, time_.busy);
    segment(std::max(cursor, proc_end_), std::min(to, tx_end_), cur.i_tx_mA, ChargeCategory::kTx, time_.busy);
    cursor = std::max(cursor, std::min(to, tx_end_));
  }
  if (phase_ == Phase::kSleep) {
    segment(cursor, to, cur.i_sleep_mA, ChargeCategory::kSleep, time_.slot_sleep);
  } else if (!config_.managed) {
    segment(cursor, to, cur.i_proc_mA, ChargeCategory::kIdle, time_.idle);
  } else {
    segment(cursor, to, cur.i_sleep_mA, ChargeCategory::kClockStop, time_.clock_stop);
  }
  draw_battery = draw_load / config_.efficiency;
}

void PowerStateMachine::advance(SimTime now) {
  if (now <= last_) return;
  double load = 0.0, battery = 0.0;
  integrate(last_, now, load, battery);
  const double harvest = config_.harvest.between(last_, now);
  const bool was_alive = phase_ != Phase::kDepleted;
  ledger_.apply_step(battery, harvest);
  last_ = now;
  if (was_alive && ledger_.stored_mAh <= 0.0 && battery > 0.0) {
    phase_ = Phase::kDepleted;
    busy_ = false;
    depleted_flag_ = true;
  }
}

ArrivalAction PowerStateMachine::on_packet_arrival(SimTime now, NicBuffer& buffer, NicRecord rec) {
  advance(now);
  if (phase_ == Phase::kDepleted) return ArrivalAction::kDropped;
  if (!buffer.push(rec)) return ArrivalAction::kDropped;
  if (phase_ == Phase::kSleep) return ArrivalAction::kBufferedAsleep;
  if (busy_) return ArrivalAction::kQueued;
  return ArrivalAction::kWake;
}

bool PowerStateMachine::can_serve(SimTime now) const {
  return phase_ == Phase::kIdle && !busy_ && now < active_until_;
}

std::optional<SimTime> PowerStateMachine::start_service(SimTime now, SimTime proc, SimTime tx) {
  advance(now);
  if (!can_serve(now)) return std::nullopt;
  const SimTime end = now + proc + tx;
  if (config_.managed && end > active_until_) return std::nullopt;
  busy_ = true;
  service_start_ = now;
  proc_end_ = now + proc;
  tx_end_ = end;
  return end;
}

void PowerStateMachine::finish_service(SimTime now) {
  advance(now);
  busy_ = false;
}

void PowerStateMachine::charge(ChargeCategory category, double load_mAh) {
  if (phase_ == Phase::kDepleted || load_mAh <= 0.0) return;
  add_category(category, load_mAh);
  const double battery = load_mAh / config_.efficiency;
  ledger_.apply_step(battery, 0.0);
  if (ledger_.stored_mAh <= 0.0) {
    phase_ = Phase::kDepleted;
    busy_ = false;
    depleted_flag_ = true;
  }
}

bool PowerStateMachine::try_restart(SimTime now) {
  advance(now);
  if (phase_ != Phase::kDepleted) return false;
  if (ledger_.stored_mAh < config_.restart_fraction * config_.capacity_mAh) return false;
  phase_ = Phase::kSleep;
  sleep_until_ = now;
  active_until_ = now;
  return true;
}

bool PowerStateMachine::take_depletion_flag() { return std::exchange(depleted_flag_, false); }

PowerState PowerStateMachine::state() const {
  if (phase_ == Phase::kDepleted) return PowerState::kDepleted;
  if (busy_) return PowerState::kActive;
  if (phase_ == Phase::kSleep) return PowerState::kSlotSleep;
  return PowerState::kClockStop;
}

}  // namespace gemn::eddc
