#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gemn/sim/engine.hpp"
#include "gemn/sim/time.hpp"

namespace gemn::net {

using sim::NodeId;
using sim::SimTime;

enum class AppClass : std::uint8_t { kSignaling, kText, kImage, kVideo, kControl, kAttack };
inline constexpr int kAppClassCount = 6;

std::string_view to_string(AppClass c);
std::optional<AppClass> parse_app_class(std::string_view text);

struct PacketRecord {
  std::uint32_t id = 0;
  AppClass app = AppClass::kSignaling;
  NodeId src = sim::kNoNode;
  NodeId dst = sim::kNoNode;
  std::uint32_t size_bits = 0;
  SimTime created_at;
  std::optional<SimTime> delivered_at;
  std::vector<NodeId> hops;
  // Non-empty for attack-flagged traffic ("dos", "ddos", ...).
  std::string tag;

  [[nodiscard]] std::uint32_t size_bytes() const { return (size_bits + 7) / 8; }
  [[nodiscard]] bool traversed(NodeId n) const;
};

}  // namespace gemn::net
