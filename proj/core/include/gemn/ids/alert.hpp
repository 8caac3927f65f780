#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gemn/net/packet.hpp"

namespace gemn::ids {

using net::NodeId;
using sim::SimTime;

enum class Detector { kSignature, kAnomaly, kBehavior };
const char* to_string(Detector d);

namespace tags {
inline constexpr const char* kDos = "dos";
inline constexpr const char* kDdos = "ddos";
inline constexpr const char* kBlackhole = "blackhole";
inline constexpr const char* kEnergyExhaust = "energy_exhaust";
}  // namespace tags

// "rule:<id>" for signature alerts.
std::string rule_tag(const std::string& rule_id);

struct Alert {
  SimTime at;
  Detector detector = Detector::kSignature;
  std::string tag;
  NodeId reporter = sim::kNoNode;
  NodeId suspect = sim::kNoNode;
  int severity = 1;
  bool block_action = false;  // signature rule with action `block`
  std::string evidence;
};

// Detectors that may legitimately raise each attack tag.
std::vector<Detector> defenses_for(const std::string& tag);
bool mapping_allows(const Alert& alert);

struct SecurityReport {
  NodeId reporter = sim::kNoNode;
  std::int64_t period = 0;
  std::map<std::string, int> counts;  // by tag
  // Suspects of alerts that met the local block criteria, most frequent first.
  std::vector<NodeId> top_suspects;
  std::vector<NodeId> local_blocks;
  bool anomaly_inactive = false;  // baseline not trained yet

  [[nodiscard]] int total() const;
};

enum class CountermeasureKind { kBlockNode, kReroute, kRulesetUpdate };
const char* to_string(CountermeasureKind k);

struct Countermeasure {
  CountermeasureKind kind = CountermeasureKind::kBlockNode;
  NodeId subject = sim::kNoNode;    // block_node / reroute
  std::string rule_text;            // ruleset_update
  SimTime issued_at;
  SimTime ttl = SimTime::from_whole_seconds(3600);

  [[nodiscard]] SimTime expires() const { return issued_at + ttl; }
};

}  // namespace gemn::ids
