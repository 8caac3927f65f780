#include "gemn/energy/dce.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gemn::energy {

std::string_view to_string(Weather w) {
  switch (w) {
    case Weather::kSunny: return "sunny";
    case Weather::kCloudy: return "cloudy";
    case Weather::kRainy: return "rainy";
  }
  return "unknown";
}

std::optional<Weather> parse_weather(std::string_view text) {
  for (Weather w : kAllWeather) {
    if (to_string(w) == text) return w;
  }
  return std::nullopt;
}

void BatteryModel::validate() const {
  if (!(capacity_mAh > 0.0)) throw std::invalid_argument("battery capacity must be positive");
  if (!(residual_fraction >= 0.0 && residual_fraction <= 1.0)) {
    throw std::invalid_argument("residual fraction must lie in [0, 1]");
  }
  if (!(discharge_efficiency > 0.0 && discharge_efficiency <= 1.0)) {
    throw std::invalid_argument("discharge efficiency must lie in (0, 1]");
  }
}

SolarPanelModel SolarPanelModel::calibrated() { return SolarPanelModel{}; }

SolarPanelModel SolarPanelModel::raw() {
  SolarPanelModel p;
  for (std::size_t i = 0; i < 3; ++i) p.daily_yield_mAh[i] = p.raw_current_mA[i] * p.charging_hours[i];
  return p;
}

void SolarPanelModel::validate() const {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(daily_yield_mAh[i] > 0.0)) throw std::invalid_argument("panel yields must be positive");
    if (!(charging_hours[i] > 0.0 && charging_hours[i] <= 24.0)) {
      throw std::invalid_argument("charging hours must lie in (0, 24]");
    }
  }
  if (!(daily_yield_mAh[0] > daily_yield_mAh[1] && daily_yield_mAh[1] > daily_yield_mAh[2])) {
    throw std::invalid_argument("panel yields must be ordered sunny > cloudy > rainy");
  }
}

void CurrentProfile::validate() const {
  for (double i : {i_tx_mA, i_rx_mA, i_proc_mA, i_sleep_mA, i_active_effective_mA}) {
    if (!(i > 0.0)) throw std::invalid_argument("state currents must be positive");
  }
  if (!(i_sleep_mA < i_active_effective_mA)) {
    throw std::invalid_argument("sleep current must be below the active current");
  }
}

double available_energy(const BatteryModel& battery, int n_panels, Weather weather, const SolarPanelModel& panel) {
  if (n_panels < 0) throw std::invalid_argument("panel count must be nonnegative");
  battery.validate();
  return battery.stored_mAh() + static_cast<double>(n_panels) * panel.daily_yield(weather);
}

double dce_divisor(const CurrentProfile& profile, double link_rate_mbps, double horizon_h) {
  if (!(profile.i_active_effective_mA > 0.0) || !(link_rate_mbps > 0.0) || !(horizon_h > 0.0)) {
    throw std::invalid_argument("divisor inputs must be positive");
  }
  return horizon_h * profile.i_active_effective_mA / link_rate_mbps;
}

double estimate_asr(double ae_mAh, double divisor, double link_rate_mbps) {
  if (!(divisor > 0.0)) throw std::invalid_argument("divisor must be positive");
  if (ae_mAh <= 0.0) return 0.0;
  return std::min(ae_mAh / divisor, link_rate_mbps);
}

double estimate_asp(double asr_mbps, double link_rate_mbps, double slot_s) {
  if (!(link_rate_mbps > 0.0) || !(slot_s > 0.0)) throw std::invalid_argument("rate and slot must be positive");
  const double asp = slot_s * (1.0 - asr_mbps / link_rate_mbps);
  return std::clamp(asp, 0.0, slot_s);
}

DutyPlan plan_day(const BatteryModel& battery, int n_panels, Weather weather, const SolarPanelModel& panel,
                  const PlannerSettings& settings) {
  DutyPlan plan;
  plan.slot_s = settings.slot_s;
  plan.available_energy_mAh = available_energy(battery, n_panels, weather, panel);
  const double divisor = dce_divisor(settings.profile, settings.link_rate_mbps, settings.horizon_h);
  plan.asr_mbps = estimate_asr(plan.available_energy_mAh, divisor, settings.link_rate_mbps);
  plan.asp_s = estimate_asp(plan.asr_mbps, settings.link_rate_mbps, settings.slot_s);
  plan.active_s = plan.slot_s - plan.asp_s;
  return plan;
}

int size_solar_array(double avg_drain_mA, const SolarPanelModel& panel, Weather design_weather) {
  if (!(avg_drain_mA > 0.0)) throw std::invalid_argument("average drain must be positive");
  const double need = 24.0 * avg_drain_mA / panel.daily_yield(design_weather);
  // Integral ratios must not round up because of representation error.
  const double nearest = std::round(need);
  if (std::abs(need - nearest) < 1e-9) return std::max(1, static_cast<int>(nearest));
  return std::max(1, static_cast<int>(std::ceil(need)));
}

double battery_life(double capacity_mAh, double avg_drain_mA, double efficiency) {
  if (!(avg_drain_mA > 0.0)) throw std::invalid_argument("drain must be positive");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw std::invalid_argument("efficiency must lie in (0, 1]");
  return capacity_mAh * efficiency / avg_drain_mA;
}

double round_half_up(double value, int places) {
  const double scale = std::pow(10.0, places);
  const double scaled = value * scale;
  // A tie that binary arithmetic lands just below .5 still rounds up.
  return std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, std::abs(scaled))) / scale;
}

}  // namespace gemn::energy
