#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gemn/metrics/series.hpp"

namespace gemn::metrics {

struct DelayStats {
  std::uint64_t samples = 0;
  double mean_s = 0.0;
  double p50_s = 0.0;
  double p95_s = 0.0;
  double p99_s = 0.0;
  double max_s = 0.0;
};

DelayStats summarize_delays(std::vector<WeightedSample> samples);

// Counted in application packets (a sensor bundle counts its readings).
struct ClassAccounting {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;

  [[nodiscard]] bool conserved() const { return generated == delivered + dropped + in_flight; }
};

struct NodeReport {
  std::uint32_t id = 0;
  std::string kind;
  double tx_bits = 0.0;
  double rx_bits = 0.0;
  std::optional<double> depleted_at_s;
  double final_fraction = 0.0;
  std::uint64_t depletions = 0;
  double asr_mbps = 0.0;
  double active_s = 0.0;
  double clock_stop_s = 0.0;
  double slot_sleep_s = 0.0;
  double depleted_s = 0.0;
};

struct RunSummary {
  std::string label;
  std::uint64_t seed = 0;
  double horizon_s = 0.0;
  double measured_from_s = 0.0;
  std::uint64_t events = 0;
  std::map<std::string, DelayStats> delay_by_app;  // end to end
  DelayStats signaling_access;                     // sensor -> first WSR
  std::map<std::string, ClassAccounting> packets_by_app;
  std::map<std::string, std::uint64_t> drops_by_cause;
  std::map<std::string, std::uint64_t> alerts_by_tag;
  std::map<std::string, std::uint64_t> alerts_by_detector;
  std::vector<std::uint32_t> network_blocks;
  std::uint64_t delivered_through_blocked = 0;
  std::vector<NodeReport> nodes;
  double max_energy_residual = 0.0;
  bool anomaly_trained = false;

  [[nodiscard]] bool packets_conserved() const;
};

std::string format_summary(const RunSummary& summary);

}  // namespace gemn::metrics
