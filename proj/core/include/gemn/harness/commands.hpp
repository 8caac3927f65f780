#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gemn/energy/dce.hpp"
#include "gemn/harness/scenario.hpp"

// Experiment commands behind the CLI. Each returns a process exit code:
// 0 pass, 1 usage error, 2 validation or acceptance failure.
namespace gemn::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailed = 2;

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::string out_dir;  // empty: the scenario's output.dir
  std::vector<std::string> overrides;
};

// Scenario from a file (or defaults when empty) with CLI overrides applied
// and validated.
ScenarioConfig resolve_scenario(const std::string& path, const CommandOptions& opts);

struct DceRow {
  int re_pct = 0;
  int panels = 0;
  energy::Weather weather = energy::Weather::kSunny;
  double ae_mAh = 0.0;
  double asr_mbps = 0.0;  // rounded half-up to 2 places
  double asp_s = 0.0;
};

// Planner output for RE {100,75,50,25}% x N {1,2} x all weather.
std::vector<DceRow> dce_table(const ScenarioConfig& cfg);
// The published values the planner is checked against.
const std::vector<DceRow>& published_dce_table();

int cmd_dce_table(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const std::string& scenario, const CommandOptions& opts, std::ostream& out, std::ostream& err);

struct SweepPoint {
  double multiplier = 0.0;
  bool managed = true;
  double offered_mbps = 0.0;
  double life_h = 0.0;
  bool depleted = false;
  double drain_mA = 0.0;
};

struct SweepCheck {
  double managed_cv = 0.0;
  bool unmanaged_decreasing = true;
  double unmanaged_ratio = 0.0;  // life at largest / life at smallest multiplier
  bool ok = true;
  std::vector<std::string> problems;
};

std::vector<SweepPoint> dos_sweep(const ScenarioConfig& cfg, std::vector<double> multipliers);
SweepCheck check_sweep(const std::vector<SweepPoint>& points);
int cmd_dos_sweep(const std::string& scenario, const std::vector<double>& multipliers, const CommandOptions& opts,
                  std::ostream& out, std::ostream& err);

struct SizingRow {
  std::string mode;
  double drain_mA = 0.0;
  int panels = 0;
  int paper_panels = 0;
  double life_h = 0.0;
  double paper_life_h = 0.0;
  [[nodiscard]] double life_deviation_pct() const { return (life_h - paper_life_h) / paper_life_h * 100.0; }
};

std::vector<SizingRow> sizing_report(const ScenarioConfig& cfg);
int cmd_sizing_report(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_validate_rules(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_show_config(const std::string& scenario, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace gemn::harness
