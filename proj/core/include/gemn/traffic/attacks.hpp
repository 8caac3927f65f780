#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gemn/net/packet.hpp"
#include "gemn/net/topology.hpp"

namespace gemn::traffic {

using net::NodeId;
using sim::SimTime;

enum class AttackKind { kEnergyExhaustDos, kBlackHole };
const char* to_string(AttackKind k);
std::optional<AttackKind> parse_attack_kind(std::string_view text);

struct AttackProfile {
  AttackKind kind = AttackKind::kEnergyExhaustDos;
  NodeId target = 0;
  double rate_multiplier = 1.0;  // DoS: multiple of the target's ASR
  SimTime start;
  SimTime stop = SimTime::max();
  std::uint32_t packet_bits = 512;
  std::string tag = "dos";
  // Attacker radio location for DoS; defaults to a spot within range of the
  // target.
  std::optional<net::Position> position;
  // Flood packets are handed to the simulator in chunks of this length.
  double chunk_s = 0.01;
};

void validate(const AttackProfile& attack);

struct FloodChunk {
  SimTime at;
  std::uint32_t packets = 0;
  std::uint64_t bits = 0;
};

// Constant-rate flood of fixed-size packets at multiplier x target ASR.
class DosInjector {
 public:
  DosInjector(const AttackProfile& attack, double target_asr_mbps);

  [[nodiscard]] double rate_mbps() const { return rate_mbps_; }
  [[nodiscard]] double packets_per_second() const { return rate_mbps_ * 1e6 / bits_; }
  [[nodiscard]] bool active() const { return rate_mbps_ > 0.0 && next_at_ < stop_; }
  [[nodiscard]] SimTime peek() const { return next_at_; }
  // Packets due in [peek, peek + chunk); nullopt once past stop.
  std::optional<FloodChunk> next();
  [[nodiscard]] std::uint64_t packets_emitted() const { return emitted_; }

 private:
  double rate_mbps_;
  double bits_;
  SimTime next_at_;
  SimTime stop_;
  SimTime chunk_;
  double carry_ = 0.0;  // fractional packets owed from earlier chunks
  std::uint64_t emitted_ = 0;
};

// Drops transit data at the compromised node; control traffic and the
// node's own packets pass.
struct BlackHole {
  NodeId node = 0;
  SimTime start;
  SimTime stop = SimTime::max();

  [[nodiscard]] bool drops(const net::PacketRecord& p, NodeId at, SimTime now) const {
    return at == node && now >= start && now < stop && p.app != net::AppClass::kControl && p.src != at &&
           p.dst != at;
  }
};

}  // namespace gemn::traffic
