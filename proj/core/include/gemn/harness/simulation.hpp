#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gemn/harness/scenario.hpp"
#include "gemn/ids/rules.hpp"
#include "gemn/metrics/series.hpp"
#include "gemn/metrics/summary.hpp"

namespace gemn::harness {

struct RunResult {
  metrics::RunSummary summary;
  std::vector<metrics::MetricSeries> battery;  // stored charge per WSR
  metrics::MetricSeries tx_kbits{"tx_kbits", "kbit", "run", "node", "tx_kbits"};
  metrics::MetricSeries rx_kbits{"rx_kbits", "kbit", "run", "node", "rx_kbits"};
  std::vector<ids::Alert> alerts;
  std::vector<ids::SecurityReport> reports;
  std::vector<ids::NetworkSummary> mcc_history;
  std::string topology_dump;
  // Time each node was first named in a network-wide block.
  std::map<net::NodeId, double> network_block_at_s;
};

// Rules from the configured file followed by the inline rule text.
std::vector<ids::Rule> load_rules(const ScenarioConfig& cfg);

// Builds the topology, traffic, energy and IDS state for one scenario and
// runs it to the horizon. Single threaded; the result depends only on the
// configuration.
RunResult run_simulation(const ScenarioConfig& cfg);
RunResult run_simulation(const ScenarioConfig& cfg, const std::vector<ids::Rule>& rules);

}  // namespace gemn::harness
