#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gemn/eddc/power_state_machine.hpp"
#include "gemn/energy/dce.hpp"
#include "gemn/ids/anomaly.hpp"
#include "gemn/ids/behavior.hpp"
#include "gemn/ids/fusion.hpp"
#include "gemn/ids/mcc.hpp"
#include "gemn/net/olsr.hpp"
#include "gemn/net/topology.hpp"
#include "gemn/traffic/attacks.hpp"
#include "gemn/traffic/generators.hpp"

namespace gemn::harness {

using nlohmann::json;

// Schema violation; `path()` is the dotted field path ("topology.wsr_count").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct OlsrConfig {
  double hello_interval_s = 2.0;
  double tc_interval_s = 5.0;
  double neighbor_hold_s = 6.0;
  double topology_hold_s = 15.0;
  double duplicate_hold_s = 30.0;

  [[nodiscard]] net::OlsrTimers timers() const;
};

struct BatteryConfig {
  double capacity_mAh = energy::defaults::kCapacityMah;
  double voltage_v = energy::defaults::kVoltage;
  double discharge_efficiency = energy::defaults::kDischargeEfficiency;
  double restart_fraction = 0.05;
};

struct PanelConfig {
  std::string preset = "calibrated";  // or "raw"
  energy::SolarPanelModel model = energy::SolarPanelModel::calibrated();
};

struct CurrentsConfig {
  energy::CurrentProfile profile;
  double rx_tx_ratio = energy::defaults::kRxTxRatio;
};

struct NodeConfig {
  double processing_rate_mbps = energy::defaults::kProcessingRateMbps;
  double packets_per_sec = energy::defaults::kPacketsPerSecond;
  std::uint64_t buffer_bytes = 2'000'000;
  double wake_latency_s = 10e-6;
  double slot_s = energy::defaults::kSlotSeconds;
  double dce_horizon_h = energy::defaults::kPlanningHorizonHours;
  bool managed = true;
};

struct WsrDefaults {
  double initial_re = 1.0;
  int panels = 2;
};

struct WsrOverride {
  std::uint32_t id = 0;
  std::optional<double> initial_re;
  std::optional<int> panels;
  std::optional<bool> managed;
};

struct EchidsConfig {
  bool enabled = true;
  double window_s = 10.0;
  double report_period_s = 60.0;
  double gap_threshold_s = 0.001;
  // Length of the clean training prefix; anomaly detection is inactive
  // until it ends and run metrics are measured from its end.
  double baseline_training_s = 0.0;
  std::string rules_path;
  std::string rules;  // inline rule text, appended after the file's rules
  ids::AnomalyConfig anomaly;
  ids::BehaviorConfig behavior;
  ids::FusionConfig fusion;
  ids::MccConfig mcc{.rule_library = ids::default_rule_library()};
};

struct DosSweepConfig {
  std::vector<double> multipliers{1.0, 2.0, 5.0, 10.0};
  double target_initial_re = 0.25;
  int target_panels = 1;
  energy::Weather target_weather = energy::Weather::kRainy;
  double max_hours = 10000.0;
};

struct OutputConfig {
  std::string dir = "out";
  double trace_interval_s = 60.0;
};

struct ScenarioConfig {
  std::string label = "default";
  std::uint64_t seed = 1;
  double horizon_s = 3600.0;
  double start_hour = 10.0;
  net::TopologySpec topology;
  net::RadioModel radio;
  OlsrConfig olsr;
  BatteryConfig battery;
  PanelConfig panel;
  CurrentsConfig currents;
  NodeConfig node;
  std::vector<energy::Weather> weather{energy::Weather::kSunny};
  WsrDefaults wsr_defaults;
  std::vector<WsrOverride> wsr_overrides;
  traffic::TrafficConfig traffic;
  std::vector<traffic::AttackProfile> attacks;
  EchidsConfig echids;
  DosSweepConfig dos_sweep;
  OutputConfig output;

  [[nodiscard]] energy::PlannerSettings planner() const;
  [[nodiscard]] double total_horizon_s() const { return echids.baseline_training_s + horizon_s; }
};

// Defaults applied for absent keys; unknown keys are rejected.
ScenarioConfig scenario_from_json(const json& j);
json scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario(const std::string& text);

// `key=value` with a dotted key; the value is read as JSON when it parses,
// otherwise as a string. A few short aliases are accepted (link_rate).
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

// Cross-field checks beyond per-field types; throws ConfigError.
void validate(const ScenarioConfig& cfg);

}  // namespace gemn::harness
