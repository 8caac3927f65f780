#include "gemn/traffic/attacks.hpp"

#include <cmath>
#include <stdexcept>

namespace gemn::traffic {

const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::kEnergyExhaustDos: return "dos";
    case AttackKind::kBlackHole: return "blackhole";
  }
  return "unknown";
}

std::optional<AttackKind> parse_attack_kind(std::string_view text) {
  if (text == "dos") return AttackKind::kEnergyExhaustDos;
  if (text == "blackhole") return AttackKind::kBlackHole;
  return std::nullopt;
}

void validate(const AttackProfile& a) {
  if (a.kind == AttackKind::kEnergyExhaustDos && !(a.rate_multiplier >= 0.0)) {
    throw std::invalid_argument("attack rate_multiplier must be nonnegative");
  }
  if (a.packet_bits == 0) throw std::invalid_argument("attack packet_bits must be positive");
  if (!(a.chunk_s > 0.0)) throw std::invalid_argument("attack chunk_s must be positive");
  if (a.stop < a.start) throw std::invalid_argument("attack stop precedes start");
}

DosInjector::DosInjector(const AttackProfile& attack, double target_asr_mbps)
    : rate_mbps_{attack.rate_multiplier * target_asr_mbps},
      bits_{static_cast<double>(attack.packet_bits)},
      next_at_{attack.start},
      stop_{attack.stop},
      chunk_{SimTime::from_seconds(attack.chunk_s)} {
  validate(attack);
}

std::optional<FloodChunk> DosInjector::next() {
  if (!active()) return std::nullopt;
  const SimTime end = std::min(next_at_ + chunk_, stop_);
  const double owed = packets_per_second() * (end - next_at_).seconds() + carry_;
  const double whole = std::floor(owed);
  carry_ = owed - whole;
  FloodChunk c;
  c.at = next_at_;
  c.packets = static_cast<std::uint32_t>(whole);
  c.bits = static_cast<std::uint64_t>(whole * bits_);
  emitted_ += c.packets;
  next_at_ = end;
  return c;
}

}  // namespace gemn::traffic
