#include "gemn/net/forwarding.hpp"

namespace gemn::net {

const char* to_string(ForwardKind k) {
  switch (k) {
    case ForwardKind::kTransmit: return "transmit";
    case ForwardKind::kDeliver: return "deliver";
    case ForwardKind::kDropNoRoute: return "drop_no_route";
    case ForwardKind::kDropTtl: return "drop_ttl";
  }
  return "unknown";
}

SimTime link_latency(double size_bits, const RadioModel& radio) {
  return sim::duration_for_bits(size_bits, radio.data_rate_mbps) + SimTime::from_seconds(radio.per_hop_proc_delay_s);
}

ForwardDecision forward(const PacketRecord& packet, NodeId at, const RoutingTable& routes, const RadioModel& radio,
                        int ttl) {
  ForwardDecision d;
  if (packet.dst == at) {
    d.kind = ForwardKind::kDeliver;
    return d;
  }
  const auto taken = packet.hops.empty() ? 0 : static_cast<int>(packet.hops.size()) - 1;
  if (taken >= ttl) {
    d.kind = ForwardKind::kDropTtl;
    return d;
  }
  auto it = routes.find(packet.dst);
  if (it == routes.end()) {
    d.kind = ForwardKind::kDropNoRoute;
    return d;
  }
  d.kind = ForwardKind::kTransmit;
  d.next_hop = it->second.next_hop;
  d.latency = link_latency(packet.size_bits, radio);
  return d;
}

void ForwardCounters::record(ForwardKind k) {
  switch (k) {
    case ForwardKind::kTransmit: ++transmitted; break;
    case ForwardKind::kDeliver: ++delivered; break;
    case ForwardKind::kDropNoRoute: ++dropped_no_route; break;
    case ForwardKind::kDropTtl: ++dropped_ttl; break;
  }
}

}  // namespace gemn::net
