#include "gemn/ids/behavior.hpp"

#include <sstream>

namespace gemn::ids {

std::optional<Alert> blackhole_check(NodeId observer, NodeId neighbor, const ForwardingStats& stats,
                                     const BehaviorConfig& cfg, SimTime now) {
  if (stats.handed < cfg.min_transit || stats.ratio() >= cfg.theta_bh) return std::nullopt;
  Alert a;
  a.at = now;
  a.detector = Detector::kBehavior;
  a.tag = tags::kBlackhole;
  a.reporter = observer;
  a.suspect = neighbor;
  a.severity = cfg.severity;
  std::ostringstream ev;
  ev << "forwarded=" << stats.forwarded << " handed=" << stats.handed;
  a.evidence = ev.str();
  return a;
}

void ForwardingMonitor::handed(NodeId neighbor, std::int64_t window, std::uint64_t units) {
  buckets_[neighbor][window].handed += units;
}

void ForwardingMonitor::forwarded(NodeId neighbor, std::int64_t window, std::uint64_t units) {
  buckets_[neighbor][window].forwarded += units;
}

ForwardingStats ForwardingMonitor::stats(NodeId neighbor, std::int64_t window) const {
  auto n = buckets_.find(neighbor);
  if (n == buckets_.end()) return {};
  auto w = n->second.find(window);
  return w == n->second.end() ? ForwardingStats{} : w->second;
}

std::vector<NodeId> ForwardingMonitor::neighbors() const {
  std::vector<NodeId> out;
  for (const auto& [id, b] : buckets_) {
    (void)b;
    out.push_back(id);
  }
  return out;
}

void ForwardingMonitor::prune(std::int64_t oldest) {
  for (auto it = buckets_.begin(); it != buckets_.end();) {
    auto& m = it->second;
    m.erase(m.begin(), m.lower_bound(oldest));
    it = m.empty() ? buckets_.erase(it) : std::next(it);
  }
}

std::optional<Alert> EnergyExhaustMonitor::feed(SimTime bin_start, double rate_bps, double asr_bps, NodeId reporter,
                                                NodeId suspect, const BehaviorConfig& cfg) {
  if (!(asr_bps > 0.0) || rate_bps <= cfg.margin * asr_bps) {
    run_ = 0;
    alerted_ = false;
    return std::nullopt;
  }
  ++run_;
  if (alerted_ || run_ < cfg.sustain_s) return std::nullopt;
  alerted_ = true;
  Alert a;
  a.at = bin_start + SimTime::from_whole_seconds(1);
  a.detector = Detector::kBehavior;
  a.tag = tags::kEnergyExhaust;
  a.reporter = reporter;
  a.suspect = suspect;
  a.severity = cfg.severity;
  std::ostringstream ev;
  ev << "ingress_bps=" << rate_bps << " asr_bps=" << asr_bps << " sustained_s=" << run_;
  a.evidence = ev.str();
  return a;
}

}  // namespace gemn::ids
