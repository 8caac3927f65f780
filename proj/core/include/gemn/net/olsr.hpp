#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "gemn/net/topology.hpp"
#include "gemn/sim/time.hpp"

namespace gemn::net {

using sim::SimTime;

struct OlsrTimers {
  SimTime hello_interval = SimTime::from_whole_seconds(2);
  SimTime tc_interval = SimTime::from_whole_seconds(5);
  SimTime neighbor_hold = SimTime::from_whole_seconds(6);
  SimTime topology_hold = SimTime::from_whole_seconds(15);
  SimTime duplicate_hold = SimTime::from_whole_seconds(30);
};

struct HelloMessage {
  NodeId origin = 0;
  std::vector<NodeId> heard;      // asymmetric links
  std::vector<NodeId> symmetric;  // symmetric links
  std::vector<NodeId> mprs;

  [[nodiscard]] double size_bits() const;
};

struct TcMessage {
  NodeId origin = 0;
  std::uint16_t ansn = 0;
  std::uint32_t sequence = 0;
  int ttl = 255;
  std::vector<NodeId> advertised;  // origin's MPR selectors

  [[nodiscard]] double size_bits() const;
};

struct Route {
  NodeId next_hop = 0;
  int hops = 0;
  bool operator==(const Route&) const = default;
};
using RoutingTable = std::map<NodeId, Route>;

struct NeighborTuple {
  bool symmetric = false;
  SimTime expires;
};

struct TopologyTuple {
  std::uint16_t ansn = 0;
  std::vector<NodeId> advertised;
  SimTime expires;
};

struct DuplicateTuple {
  SimTime expires;
  bool retransmitted = false;
};

struct OlsrState {
  std::map<NodeId, NeighborTuple> neighbors;
  // neighbor -> (2-hop node -> expiry)
  std::map<NodeId, std::map<NodeId, SimTime>> two_hop;
  std::set<NodeId> mprs;
  std::map<NodeId, SimTime> mpr_selectors;
  std::map<NodeId, TopologyTuple> topology;
  std::map<std::pair<NodeId, std::uint32_t>, DuplicateTuple> duplicates;

  [[nodiscard]] std::set<NodeId> symmetric_neighbors() const;
};

// Greedy cover: sole reachers first, then the neighbor covering the most
// uncovered 2-hop nodes, ties to the lowest id.
std::set<NodeId> mpr_select(const std::set<NodeId>& neighbors,
                            const std::map<NodeId, std::set<NodeId>>& two_hop_map);

// Shortest-hop routes over symmetric neighbors, 2-hop links and the TC
// topology set. Blocked nodes are neither destinations nor relays.
RoutingTable compute_routes(NodeId self, const OlsrState& state, const std::set<NodeId>& blocked);

class OlsrAgent {
 public:
  OlsrAgent(NodeId self, OlsrTimers timers);

  [[nodiscard]] NodeId id() const { return self_; }
  HelloMessage make_hello(SimTime now);
  void on_hello(const HelloMessage& msg, SimTime now);
  // nullopt when there are no MPR selectors to advertise.
  std::optional<TcMessage> make_tc(SimTime now);
  // Returns true when this node must retransmit the message.
  bool on_tc(const TcMessage& msg, NodeId from, SimTime now);
  void expire(SimTime now);

  void set_blocked(std::set<NodeId> blocked);
  [[nodiscard]] const std::set<NodeId>& blocked() const { return blocked_; }
  // Immutable snapshot; recomputed only after state changes.
  std::shared_ptr<const RoutingTable> routes(SimTime now);
  [[nodiscard]] const OlsrState& state() const { return state_; }
  [[nodiscard]] std::uint64_t route_computations() const { return computations_; }

 private:
  void refresh_mprs();

  NodeId self_;
  OlsrTimers timers_;
  OlsrState state_;
  std::set<NodeId> blocked_;
  std::set<NodeId> advertised_last_;
  std::uint16_t ansn_ = 0;
  std::uint32_t sequence_ = 0;
  bool dirty_ = true;
  // Earliest expiry among held tuples; expire() is a no-op before it.
  SimTime next_expiry_ = SimTime::max();
  void note_expiry(SimTime t) { next_expiry_ = std::min(next_expiry_, t); }
  std::shared_ptr<const RoutingTable> table_;
  std::uint64_t computations_ = 0;
};

struct OlsrCounters {
  std::uint64_t hello_sent = 0;
  std::uint64_t tc_originated = 0;
  std::uint64_t tc_forwarded = 0;
  double control_bits = 0.0;
};

// Message exchange among the routing nodes of a topology. Delivery is
// immediate; the caller schedules emissions and charges energy via hooks.
class OlsrDomain {
 public:
  struct Hooks {
    std::function<bool(NodeId)> alive;               // may transmit/receive
    std::function<void(NodeId, double bits)> on_tx;  // energy charging
    std::function<void(NodeId, double bits)> on_rx;
  };

  OlsrDomain(const Topology& topology, OlsrTimers timers, Hooks hooks = {});

  void emit_hello(NodeId node, SimTime now);
  void emit_tc(NodeId node, SimTime now);
  [[nodiscard]] bool participates(NodeId node) const;
  void set_hooks(Hooks hooks) { hooks_ = std::move(hooks); }
  OlsrAgent& agent(NodeId node);
  [[nodiscard]] const OlsrAgent& agent(NodeId node) const;
  [[nodiscard]] const OlsrTimers& timers() const { return timers_; }
  [[nodiscard]] const OlsrCounters& counters() const { return counters_; }
  // Deterministic per-node phase so emissions do not all coincide.
  [[nodiscard]] static SimTime hello_phase(NodeId node);
  [[nodiscard]] static SimTime tc_phase(NodeId node);

  // Runs Hello/TC timers in isolation (no energy, all nodes alive).
  void run_until(SimTime horizon);

 private:
  bool alive(NodeId n) const { return !hooks_.alive || hooks_.alive(n); }

  const Topology* topology_;
  OlsrTimers timers_;
  Hooks hooks_;
  std::map<NodeId, OlsrAgent> agents_;
  OlsrCounters counters_;
};

}  // namespace gemn::net
