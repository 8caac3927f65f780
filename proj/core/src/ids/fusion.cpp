#include "gemn/ids/fusion.hpp"

#include <algorithm>

namespace gemn::ids {

const char* to_string(Detector d) {
  switch (d) {
    case Detector::kSignature: return "signature";
    case Detector::kAnomaly: return "anomaly";
    case Detector::kBehavior: return "behavior";
  }
  return "unknown";
}

std::string rule_tag(const std::string& rule_id) { return "rule:" + rule_id; }

std::vector<Detector> defenses_for(const std::string& tag) {
  if (tag == tags::kBlackhole) return {Detector::kBehavior};
  if (tag == tags::kEnergyExhaust) return {Detector::kBehavior, Detector::kAnomaly};
  if (tag == tags::kDos || tag == tags::kDdos) return {Detector::kSignature, Detector::kAnomaly};
  if (tag.rfind("rule:", 0) == 0) return {Detector::kSignature};
  return {};
}

bool mapping_allows(const Alert& alert) {
  const auto allowed = defenses_for(alert.tag);
  return std::find(allowed.begin(), allowed.end(), alert.detector) != allowed.end();
}

int SecurityReport::total() const {
  int t = 0;
  for (const auto& [tag, n] : counts) t += n;
  return t;
}

const char* to_string(CountermeasureKind k) {
  switch (k) {
    case CountermeasureKind::kBlockNode: return "block_node";
    case CountermeasureKind::kReroute: return "reroute";
    case CountermeasureKind::kRulesetUpdate: return "ruleset_update";
  }
  return "unknown";
}

bool actionable(const Alert& alert, const FusionConfig& cfg) {
  return alert.severity >= cfg.block_threshold || alert.detector == Detector::kBehavior || alert.block_action;
}

std::vector<NodeId> fuse(std::span<const Alert> alerts, NodeId self, std::optional<NodeId> mcc,
                         const FusionConfig& cfg) {
  std::vector<NodeId> blocks;
  for (const auto& a : alerts) {
    if (!actionable(a, cfg) || a.suspect == sim::kNoNode || a.suspect == self || (mcc && a.suspect == *mcc)) continue;
    blocks.push_back(a.suspect);
  }
  std::sort(blocks.begin(), blocks.end());
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
  return blocks;
}

void ReportBuilder::add(const Alert& alert, bool is_actionable) {
  ++counts_[alert.tag];
  ++total_;
  if (is_actionable && alert.suspect != sim::kNoNode && alert.suspect != reporter_) ++suspects_[alert.suspect];
}

void ReportBuilder::add_block(NodeId subject) { blocks_.push_back(subject); }

SecurityReport ReportBuilder::take(std::int64_t period, bool anomaly_inactive) {
  SecurityReport r;
  r.reporter = reporter_;
  r.period = period;
  r.counts = std::move(counts_);
  r.anomaly_inactive = anomaly_inactive;
  std::vector<std::pair<NodeId, int>> ranked(suspects_.begin(), suspects_.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [id, n] : ranked) r.top_suspects.push_back(id);
  r.local_blocks = std::move(blocks_);
  counts_.clear();
  suspects_.clear();
  blocks_.clear();
  total_ = 0;
  return r;
}

}  // namespace gemn::ids
