#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gemn/ids/alert.hpp"

namespace gemn::ids {

struct MccConfig {
  int quorum = 2;
  // Reports older than this many periods no longer count toward a quorum.
  int quorum_memory_periods = 5;
  SimTime block_ttl = SimTime::from_whole_seconds(3600);
  // Attack tag -> rule text distributed when that tag dominates a period.
  std::map<std::string, std::string> rule_library;
};

std::map<std::string, std::string> default_rule_library();

struct NetworkSummary {
  std::int64_t period = 0;
  int reports = 0;
  std::map<std::string, int> counts;
  std::map<NodeId, std::set<NodeId>> suspect_reporters;
  std::vector<Countermeasure> issued;
};

class MccAggregator {
 public:
  MccAggregator(MccConfig cfg, std::optional<NodeId> mcc);

  NetworkSummary aggregate(std::int64_t period, std::span<const SecurityReport> reports, SimTime now);
  [[nodiscard]] std::set<NodeId> blocked(SimTime now) const;
  [[nodiscard]] const std::vector<NetworkSummary>& history() const { return history_; }
  [[nodiscard]] const MccConfig& config() const { return cfg_; }

 private:
  MccConfig cfg_;
  std::optional<NodeId> mcc_;
  // suspect -> reporter -> last period it was named
  std::map<NodeId, std::map<NodeId, std::int64_t>> named_;
  std::map<NodeId, SimTime> blocks_;  // subject -> expiry
  std::set<std::string> distributed_;
  std::vector<NetworkSummary> history_;
};

}  // namespace gemn::ids
