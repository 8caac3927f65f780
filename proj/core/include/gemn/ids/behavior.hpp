#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "gemn/ids/alert.hpp"
#include "gemn/ids/features.hpp"

namespace gemn::ids {

struct BehaviorConfig {
  double theta_bh = 0.2;
  std::uint64_t min_transit = 50;
  double margin = 1.5;
  int sustain_s = 30;
  // Chance that a given hand-off is observed by the upstream node.
  double observation_probability = 1.0;
  int severity = 4;
};

struct ForwardingStats {
  std::uint64_t handed = 0;
  std::uint64_t forwarded = 0;

  [[nodiscard]] double ratio() const {
    return handed ? static_cast<double>(forwarded) / static_cast<double>(handed) : 1.0;
  }
};

std::optional<Alert> blackhole_check(NodeId observer, NodeId neighbor, const ForwardingStats& stats,
                                     const BehaviorConfig& cfg, SimTime now);

// Per-observer hand-off accounting, bucketed by the window in which the
// transit packet was handed to the neighbor.
class ForwardingMonitor {
 public:
  void handed(NodeId neighbor, std::int64_t window, std::uint64_t units = 1);
  void forwarded(NodeId neighbor, std::int64_t window, std::uint64_t units = 1);
  [[nodiscard]] ForwardingStats stats(NodeId neighbor, std::int64_t window) const;
  [[nodiscard]] std::vector<NodeId> neighbors() const;
  // Drops buckets older than `oldest`.
  void prune(std::int64_t oldest);

 private:
  std::map<NodeId, std::map<std::int64_t, ForwardingStats>> buckets_;
};

// Ingress above margin x ASR for `sustain_s` consecutive 1 s bins raises one
// alert; the episode ends at the first bin back under the margin.
class EnergyExhaustMonitor {
 public:
  std::optional<Alert> feed(SimTime bin_start, double rate_bps, double asr_bps, NodeId reporter, NodeId suspect,
                            const BehaviorConfig& cfg);
  [[nodiscard]] int run_length() const { return run_; }

 private:
  int run_ = 0;
  bool alerted_ = false;
};

}  // namespace gemn::ids
