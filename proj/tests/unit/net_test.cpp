#include <gtest/gtest.h>

#include <cmath>
#include <queue>

#include "gemn/net/forwarding.hpp"
#include "gemn/net/olsr.hpp"
#include "gemn/net/topology.hpp"

using namespace gemn;
using namespace gemn::net;

namespace {

std::map<NodeId, int> bfs(const Topology& t, NodeId src, const std::set<NodeId>& blocked = {}) {
  std::map<NodeId, int> dist{{src, 0}};
  std::queue<NodeId> q;
  q.push(src);
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId v : t.neighbors(u)) {
      if (t.node(v).kind == NodeKind::kAttacker || blocked.count(v) || dist.count(v)) continue;
      dist[v] = dist[u] + 1;
      q.push(v);
    }
  }
  return dist;
}

Topology line(int n, double pitch = 250.0) {
  TopologySpec spec;
  spec.placement = Placement::kExplicit;
  spec.include_mcc = false;
  for (int i = 0; i < n; ++i) spec.positions.push_back({i * pitch, 0.0});
  sim::RandomStream rng(1, "topo");
  return build_topology(spec, RadioModel{}, rng);
}

}  // namespace

TEST(Topology, GridHasUnitDiskLinks) {
  TopologySpec spec;
  spec.wsr_count = 9;
  spec.include_mcc = false;
  sim::RandomStream rng(1, "topo");
  const auto t = build_topology(spec, RadioModel{}, rng);
  ASSERT_EQ(t.size(), 9u);
  // pitch 250 and range 300: only axis neighbours link
  EXPECT_EQ(t.link_count(), 12u);
  EXPECT_TRUE(t.linked(0, 1));
  EXPECT_FALSE(t.linked(0, 4));
  EXPECT_TRUE(t.connected());
}

TEST(Topology, DefaultGridPlacesMccAmongRouters) {
  TopologySpec spec;
  sim::RandomStream rng(1, "topo");
  const auto t = build_topology(spec, RadioModel{}, rng);
  ASSERT_TRUE(t.mcc().has_value());
  EXPECT_EQ(*t.mcc(), 40u);
  EXPECT_FALSE(t.neighbors(*t.mcc()).empty());
  EXPECT_EQ(t.routing_nodes().size(), 41u);
}

TEST(Topology, DisconnectedExplicitLayoutIsRejected) {
  TopologySpec spec;
  spec.placement = Placement::kExplicit;
  spec.include_mcc = false;
  spec.positions = {{0, 0}, {200, 0}, {2000, 0}};
  sim::RandomStream rng(1, "topo");
  try {
    build_topology(spec, RadioModel{}, rng);
    FAIL() << "expected TopologyError";
  } catch (const TopologyError& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(Topology, AttackersDoNotRoute) {
  TopologySpec spec;
  spec.placement = Placement::kExplicit;
  spec.include_mcc = false;
  spec.positions = {{0, 0}, {250, 0}};
  spec.attackers = {{50, 0}};
  sim::RandomStream rng(1, "topo");
  const auto t = build_topology(spec, RadioModel{}, rng);
  EXPECT_EQ(t.node(2).kind, NodeKind::kAttacker);
  EXPECT_EQ(t.routing_nodes(), (std::vector<NodeId>{0, 1}));
}

TEST(Mpr, GreedyCoverPrefersSoleReachers) {
  // 1 is the only way to 10; 2 and 3 both reach 11, 3 also reaches 12
  const std::set<NodeId> n{1, 2, 3};
  const std::map<NodeId, std::set<NodeId>> two{{1, {10}}, {2, {11}}, {3, {11, 12}}};
  EXPECT_EQ(mpr_select(n, two), (std::set<NodeId>{1, 3}));
}

TEST(Mpr, EmptyTwoHopNeedsNoRelays) { EXPECT_TRUE(mpr_select({1, 2}, {}).empty()); }

TEST(Olsr, LineConvergesToHopCounts) {
  const auto t = line(6);
  OlsrDomain d(t, OlsrTimers{});
  d.run_until(SimTime::from_whole_seconds(30));
  const auto routes = d.agent(0).routes(SimTime::from_whole_seconds(30));
  for (NodeId dst = 1; dst < 6; ++dst) {
    ASSERT_TRUE(routes->count(dst)) << dst;
    EXPECT_EQ(routes->at(dst).hops, static_cast<int>(dst));
    EXPECT_EQ(routes->at(dst).next_hop, 1u);
  }
}

TEST(Olsr, BlockedNodeIsRoutedAround) {
  // 2x3 grid: 0-1-2 over 3-4-5. Blocking 1 leaves 0 -> 3 -> 4 as the only
  // way east. Only MPR-selector links are advertised, so destinations whose
  // detour is not advertised may drop out, but no route may use 1.
  TopologySpec spec;
  spec.placement = Placement::kExplicit;
  spec.include_mcc = false;
  spec.positions = {{0, 0}, {250, 0}, {500, 0}, {0, 250}, {250, 250}, {500, 250}};
  sim::RandomStream rng(1, "topo");
  const auto t = build_topology(spec, RadioModel{}, rng);
  OlsrDomain d(t, OlsrTimers{});
  d.run_until(SimTime::from_whole_seconds(30));
  auto& a = d.agent(0);
  ASSERT_EQ(a.routes(SimTime::from_whole_seconds(30))->at(2).next_hop, 1u);
  a.set_blocked({1});
  const auto routes = a.routes(SimTime::from_whole_seconds(30));
  EXPECT_FALSE(routes->count(1));
  ASSERT_TRUE(routes->count(4));
  EXPECT_EQ(routes->at(4).next_hop, 3u);
  EXPECT_EQ(routes->at(4).hops, 2);
  const auto want = bfs(t, 0, {1});
  for (const auto& [dst, r] : *routes) {
    EXPECT_NE(r.next_hop, 1u);
    EXPECT_EQ(r.hops, want.at(dst));
  }
}

TEST(Olsr, RoutesMatchBfsAndMprsCoverTwoHops) {
  sim::RandomStream seeds(17, "olsr-prop");
  for (int trial = 0; trial < 10; ++trial) {
    TopologySpec spec;
    spec.placement = Placement::kRandomConnected;
    spec.wsr_count = 10 + trial * 3;
    spec.random_area_m = 250.0 * std::sqrt(static_cast<double>(spec.wsr_count));
    spec.include_mcc = false;
    auto rng = seeds.split(static_cast<std::uint64_t>(trial));
    const auto t = build_topology(spec, RadioModel{}, rng);
    OlsrDomain d(t, OlsrTimers{});
    const auto now = SimTime::from_whole_seconds(40);
    d.run_until(now);
    for (NodeId s : t.routing_nodes()) {
      const auto want = bfs(t, s);
      auto& agent = d.agent(s);
      const auto routes = agent.routes(now);
      ASSERT_EQ(routes->size() + 1, want.size()) << "trial " << trial << " node " << s;
      for (const auto& [dst, r] : *routes) {
        ASSERT_EQ(r.hops, want.at(dst));
        ASSERT_TRUE(t.linked(s, r.next_hop));
      }
      // every strict 2-hop neighbour is adjacent to some MPR
      const auto& mprs = agent.state().mprs;
      for (const auto& [v, h] : want) {
        if (h != 2) continue;
        bool covered = false;
        for (NodeId m : mprs) covered = covered || t.linked(m, v);
        ASSERT_TRUE(covered) << "trial " << trial << " node " << s << " two-hop " << v;
      }
    }
  }
}

TEST(Olsr, SilentNeighbourExpires) {
  const auto t = line(3);
  OlsrDomain d(t, OlsrTimers{});
  d.run_until(SimTime::from_whole_seconds(20));
  auto& a = d.agent(0);
  EXPECT_TRUE(a.routes(SimTime::from_whole_seconds(20))->count(2));
  a.expire(SimTime::from_whole_seconds(60));
  EXPECT_TRUE(a.routes(SimTime::from_whole_seconds(60))->empty());
}

TEST(Forwarding, DecisionsAndLatency) {
  RoutingTable routes{{5, {2, 3}}};
  RadioModel radio;
  radio.per_hop_proc_delay_s = 0.001;
  PacketRecord p;
  p.size_bits = 18000;
  p.dst = 5;
  auto d = forward(p, 1, routes, radio);
  EXPECT_EQ(d.kind, ForwardKind::kTransmit);
  EXPECT_EQ(d.next_hop, 2u);
  EXPECT_EQ(d.latency, SimTime::from_seconds(0.002));
  EXPECT_EQ(forward(p, 5, routes, radio).kind, ForwardKind::kDeliver);
  p.dst = 9;
  EXPECT_EQ(forward(p, 1, routes, radio).kind, ForwardKind::kDropNoRoute);
  p.dst = 5;
  p.hops.assign(kDefaultTtl + 1, 0);
  EXPECT_EQ(forward(p, 1, routes, radio).kind, ForwardKind::kDropTtl);
}

TEST(Forwarding, ControlMessageSizesGrowWithLists) {
  HelloMessage h;
  const double empty = h.size_bits();
  h.symmetric = {1, 2, 3};
  EXPECT_GT(h.size_bits(), empty);
  TcMessage tc;
  const double tc_empty = tc.size_bits();
  tc.advertised = {1};
  EXPECT_GT(tc.size_bits(), tc_empty);
}
