#pragma once

#include <cstdint>

#include "gemn/net/olsr.hpp"
#include "gemn/net/packet.hpp"

namespace gemn::net {

inline constexpr int kDefaultTtl = 32;

enum class ForwardKind { kTransmit, kDeliver, kDropNoRoute, kDropTtl };
const char* to_string(ForwardKind k);

struct ForwardDecision {
  ForwardKind kind = ForwardKind::kDropNoRoute;
  NodeId next_hop = sim::kNoNode;
  SimTime latency;  // per-hop link latency when transmitting
};

// size_bits / data_rate + per-hop processing delay.
SimTime link_latency(double size_bits, const RadioModel& radio);

// Decision for `packet` currently held at `at`. The routing table is the
// holder's snapshot, already pruned of blocked nodes.
ForwardDecision forward(const PacketRecord& packet, NodeId at, const RoutingTable& routes, const RadioModel& radio,
                        int ttl = kDefaultTtl);

struct ForwardCounters {
  std::uint64_t transmitted = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_no_route = 0;
  std::uint64_t dropped_ttl = 0;

  void record(ForwardKind k);
};

}  // namespace gemn::net
