#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gemn/ids/alert.hpp"

namespace gemn::ids {

struct FusionConfig {
  int block_threshold = 3;
};

// Severity at or above the threshold, a behavior verdict, or a `block` rule.
bool actionable(const Alert& alert, const FusionConfig& cfg);

// Local block list for a window's alerts. Never blocks the reporter itself
// or the MCC; sorted and free of duplicates.
std::vector<NodeId> fuse(std::span<const Alert> alerts, NodeId self, std::optional<NodeId> mcc,
                         const FusionConfig& cfg);

// Accumulates one WSR's alerts and actions for the current report period.
class ReportBuilder {
 public:
  explicit ReportBuilder(NodeId reporter) : reporter_{reporter} {}

  void add(const Alert& alert, bool is_actionable);
  void add_block(NodeId subject);
  [[nodiscard]] int pending() const { return total_; }
  // Returns the finished report and starts the next period.
  SecurityReport take(std::int64_t period, bool anomaly_inactive);

 private:
  NodeId reporter_;
  std::map<std::string, int> counts_;
  std::map<NodeId, int> suspects_;
  std::vector<NodeId> blocks_;
  int total_ = 0;
};

}  // namespace gemn::ids
