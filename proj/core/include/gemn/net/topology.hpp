#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gemn/sim/engine.hpp"
#include "gemn/sim/random.hpp"

namespace gemn::net {

using sim::NodeId;

enum class NodeKind { kWsr, kMcc, kSensor, kAttacker };
const char* to_string(NodeKind k);

struct Position {
  double x = 0.0;
  double y = 0.0;
};
double distance(Position a, Position b);

struct NodeDescriptor {
  NodeId id = 0;
  NodeKind kind = NodeKind::kWsr;
  Position pos;
};

struct RadioModel {
  double range_m = 300.0;
  double data_rate_mbps = 18.0;
  double per_hop_proc_delay_s = 0.0;

  [[nodiscard]] bool in_range(Position a, Position b) const { return distance(a, b) <= range_m; }
};

enum class Placement { kExplicit, kGrid, kRandomConnected };
const char* to_string(Placement p);
std::optional<Placement> parse_placement(std::string_view text);

struct TopologySpec {
  Placement placement = Placement::kGrid;
  int wsr_count = 40;
  double span_m = 5000.0;
  double grid_pitch_m = 250.0;
  // Side of the square that random placement samples from.
  double random_area_m = 1500.0;
  int max_attempts = 1000;
  bool include_mcc = true;
  std::optional<Position> mcc_position;
  std::vector<Position> positions;  // explicit WSR coordinates
  std::vector<Position> attackers;  // non-routing attacker radios
};

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nodes and symmetric unit-disk links. Ids are dense: WSRs first, then the
// MCC, then attackers.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<NodeDescriptor> nodes, const RadioModel& radio);

  [[nodiscard]] const std::vector<NodeDescriptor>& nodes() const { return nodes_; }
  [[nodiscard]] const NodeDescriptor& node(NodeId id) const { return nodes_.at(id); }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] const std::vector<NodeId>& neighbors(NodeId id) const { return adjacency_.at(id); }
  [[nodiscard]] bool linked(NodeId a, NodeId b) const;
  [[nodiscard]] std::size_t link_count() const;
  [[nodiscard]] std::optional<NodeId> mcc() const { return mcc_; }
  [[nodiscard]] std::vector<NodeId> routing_nodes() const;  // WSRs and MCC
  // Connected components over routing nodes, each sorted, ordered by first id.
  [[nodiscard]] std::vector<std::vector<NodeId>> components() const;
  [[nodiscard]] bool connected() const { return components().size() <= 1; }

 private:
  std::vector<NodeDescriptor> nodes_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::optional<NodeId> mcc_;
};

// Throws TopologyError for a disconnected explicit layout (naming the
// isolated partition), or when random placement cannot find a connected
// layout within max_attempts.
Topology build_topology(const TopologySpec& spec, const RadioModel& radio, sim::RandomStream& placement_rng);

}  // namespace gemn::net
