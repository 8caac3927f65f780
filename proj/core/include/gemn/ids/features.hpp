#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gemn/net/packet.hpp"

namespace gemn::ids {

using net::AppClass;
using net::NodeId;
using sim::SimTime;

// One ingress observation: `packets` packets totalling `bits`, spread evenly
// over [at, at + span). A zero span is a single instant.
struct IngressRecord {
  SimTime at;
  SimTime span;
  NodeId src = sim::kNoNode;   // originator
  NodeId dst = sim::kNoNode;   // final destination
  NodeId prev = sim::kNoNode;  // transmitting neighbor
  AppClass app = AppClass::kSignaling;
  std::uint32_t packets = 1;
  std::uint64_t bits = 0;
  std::string tag;
};

struct TrafficFeatures {
  SimTime start;
  SimTime end;
  double avg_rate_bps = 0.0;
  double peak_rate_bps = 0.0;
  double burst_size_bits = 0.0;
  std::uint64_t total_bits = 0;
  std::uint64_t total_packets = 0;
  std::map<NodeId, std::uint64_t> per_source_packets;
  std::vector<double> bin_rates_bps;  // per 1 s bin, in window order

  [[nodiscard]] double window_s() const { return (end - start).seconds(); }
  // Largest single-source share of packets, with the source; {kNoNode, 0}
  // when empty.
  [[nodiscard]] std::pair<NodeId, double> top_source() const;
};

inline constexpr SimTime kDefaultGapThreshold = SimTime::from_us(1000);

// Records outside [start, end) are clipped proportionally. Peak is taken over
// 1 s bins aligned to `start`; burst is the largest run of bits whose
// inter-packet gaps stay under `gap_threshold`.
TrafficFeatures extract_features(std::span<const IngressRecord> records, SimTime start, SimTime end,
                                 SimTime gap_threshold = kDefaultGapThreshold);

}  // namespace gemn::ids
