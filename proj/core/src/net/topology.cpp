#include "gemn/net/topology.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "gemn/net/packet.hpp"

namespace gemn::net {

std::string_view to_string(AppClass c) {
  switch (c) {
    case AppClass::kSignaling: return "signaling";
    case AppClass::kText: return "text";
    case AppClass::kImage: return "image";
    case AppClass::kVideo: return "video";
    case AppClass::kControl: return "control";
    case AppClass::kAttack: return "attack";
  }
  return "unknown";
}

std::optional<AppClass> parse_app_class(std::string_view text) {
  for (int i = 0; i < kAppClassCount; ++i) {
    const auto c = static_cast<AppClass>(i);
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

bool PacketRecord::traversed(NodeId n) const { return std::find(hops.begin(), hops.end(), n) != hops.end(); }

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::kWsr: return "wsr";
    case NodeKind::kMcc: return "mcc";
    case NodeKind::kSensor: return "sensor";
    case NodeKind::kAttacker: return "attacker";
  }
  return "unknown";
}

const char* to_string(Placement p) {
  switch (p) {
    case Placement::kExplicit: return "explicit";
    case Placement::kGrid: return "grid";
    case Placement::kRandomConnected: return "random";
  }
  return "unknown";
}

std::optional<Placement> parse_placement(std::string_view text) {
  if (text == "explicit") return Placement::kExplicit;
  if (text == "grid") return Placement::kGrid;
  if (text == "random") return Placement::kRandomConnected;
  return std::nullopt;
}

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

Topology::Topology(std::vector<NodeDescriptor> nodes, const RadioModel& radio) : nodes_{std::move(nodes)} {
  adjacency_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != i) throw TopologyError("node ids must be dense and ordered");
    if (nodes_[i].kind == NodeKind::kMcc) mcc_ = nodes_[i].id;
    for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
      if (radio.in_range(nodes_[i].pos, nodes_[j].pos)) {
        adjacency_[i].push_back(static_cast<NodeId>(j));
        adjacency_[j].push_back(static_cast<NodeId>(i));
      }
    }
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

bool Topology::linked(NodeId a, NodeId b) const {
  const auto& adj = adjacency_.at(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::size_t Topology::link_count() const {
  std::size_t total = 0;
  for (const auto& adj : adjacency_) total += adj.size();
  return total / 2;
}

std::vector<NodeId> Topology::routing_nodes() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::kWsr || n.kind == NodeKind::kMcc) out.push_back(n.id);
  }
  return out;
}

std::vector<std::vector<NodeId>> Topology::components() const {
  std::vector<int> comp(nodes_.size(), -1);
  std::vector<std::vector<NodeId>> out;
  auto routing = [&](NodeId id) {
    return nodes_[id].kind == NodeKind::kWsr || nodes_[id].kind == NodeKind::kMcc;
  };
  for (const auto& start : nodes_) {
    if (!routing(start.id) || comp[start.id] >= 0) continue;
    std::vector<NodeId> members;
    std::queue<NodeId> q;
    q.push(start.id);
    comp[start.id] = static_cast<int>(out.size());
    while (!q.empty()) {
      const NodeId u = q.front();
      q.pop();
      members.push_back(u);
      for (NodeId v : adjacency_[u]) {
        if (routing(v) && comp[v] < 0) {
          comp[v] = comp[u];
          q.push(v);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

namespace {

std::vector<NodeDescriptor> assemble(const std::vector<Position>& wsrs, std::optional<Position> mcc,
                                     const std::vector<Position>& attackers) {
  std::vector<NodeDescriptor> nodes;
  NodeId next = 0;
  for (const auto& p : wsrs) nodes.push_back({next++, NodeKind::kWsr, p});
  if (mcc) nodes.push_back({next++, NodeKind::kMcc, *mcc});
  for (const auto& p : attackers) nodes.push_back({next++, NodeKind::kAttacker, p});
  return nodes;
}

Position centroid(const std::vector<Position>& ps) {
  Position c;
  if (ps.empty()) return c;
  for (const auto& p : ps) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(ps.size());
  c.y /= static_cast<double>(ps.size());
  return c;
}

void check_span(const std::vector<Position>& ps, double span) {
  for (const auto& p : ps) {
    if (p.x < 0.0 || p.y < 0.0 || p.x > span || p.y > span) {
      std::ostringstream os;
      os << "position (" << p.x << ", " << p.y << ") lies outside the " << span << " m span";
      throw TopologyError(os.str());
    }
  }
}

std::string describe_partitions(const std::vector<std::vector<NodeId>>& comps) {
  std::ostringstream os;
  os << "topology is disconnected; isolated partition";
  if (comps.size() > 2) os << "s";
  for (std::size_t i = 1; i < comps.size(); ++i) {
    os << (i == 1 ? ": {" : ", {");
    for (std::size_t j = 0; j < comps[i].size(); ++j) os << (j ? "," : "") << comps[i][j];
    os << "}";
  }
  return os.str();
}

}  // namespace

Topology build_topology(const TopologySpec& spec, const RadioModel& radio, sim::RandomStream& rng) {
  if (spec.wsr_count < 0) throw TopologyError("wsr_count must be nonnegative");
  std::vector<Position> wsrs;
  std::optional<Position> mcc;

  switch (spec.placement) {
    case Placement::kExplicit: {
      wsrs = spec.positions;
      if (spec.include_mcc) mcc = spec.mcc_position.value_or(centroid(wsrs));
      break;
    }
    case Placement::kGrid: {
      if (!(spec.grid_pitch_m > 0.0)) throw TopologyError("grid pitch must be positive");
      const int n = spec.wsr_count;
      const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
      const int rows = n == 0 ? 0 : (n + cols - 1) / cols;
      const double margin = spec.grid_pitch_m;
      for (int i = 0; i < n; ++i) {
        wsrs.push_back({margin + (i % cols) * spec.grid_pitch_m, margin + (i / cols) * spec.grid_pitch_m});
      }
      if (spec.include_mcc) {
        // Grid centre; with an even number of columns or rows this falls
        // between routers and links to all of the surrounding ones.
        mcc = spec.mcc_position.value_or(Position{margin + (cols - 1) * spec.grid_pitch_m / 2.0,
                                                  margin + (std::max(rows, 1) - 1) * spec.grid_pitch_m / 2.0});
      }
      break;
    }
    case Placement::kRandomConnected: {
      const double side = std::min(spec.random_area_m, spec.span_m);
      for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
        wsrs.clear();
        for (int i = 0; i < spec.wsr_count; ++i) wsrs.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side)});
        if (spec.include_mcc) mcc = spec.mcc_position.value_or(Position{side / 2.0, side / 2.0});
        Topology t(assemble(wsrs, mcc, {}), radio);
        if (t.connected()) return Topology(assemble(wsrs, mcc, spec.attackers), radio);
      }
      throw TopologyError("random placement found no connected layout in " + std::to_string(spec.max_attempts) +
                          " attempts");
    }
  }

  check_span(wsrs, spec.span_m);
  if (mcc) check_span({*mcc}, spec.span_m);
  check_span(spec.attackers, spec.span_m);
  Topology topo(assemble(wsrs, mcc, spec.attackers), radio);
  const auto comps = topo.components();
  if (comps.size() > 1) throw TopologyError(describe_partitions(comps));
  return topo;
}

}  // namespace gemn::net
