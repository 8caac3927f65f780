#include "gemn/ids/mcc.hpp"

#include <algorithm>

namespace gemn::ids {

std::map<std::string, std::string> default_rule_library() {
  return {
      {tags::kDos, "alert udp any -> any tag=dos sev=3 id=mcc-dos"},
      {tags::kDdos, "alert udp any -> any tag=ddos sev=3 id=mcc-ddos"},
      {tags::kEnergyExhaust, "alert udp any -> any tag=dos sev=3 id=mcc-energy"},
  };
}

MccAggregator::MccAggregator(MccConfig cfg, std::optional<NodeId> mcc) : cfg_{std::move(cfg)}, mcc_{mcc} {}

NetworkSummary MccAggregator::aggregate(std::int64_t period, std::span<const SecurityReport> reports, SimTime now) {
  NetworkSummary s;
  s.period = period;
  for (const auto& r : reports) {
    ++s.reports;
    for (const auto& [tag, n] : r.counts) s.counts[tag] += n;
    for (NodeId suspect : r.top_suspects) {
      s.suspect_reporters[suspect].insert(r.reporter);
      named_[suspect][r.reporter] = period;
    }
  }

  std::erase_if(blocks_, [&](const auto& kv) { return kv.second <= now; });
  for (auto& [suspect, reporters] : named_) {
    std::erase_if(reporters, [&](const auto& kv) { return period - kv.second >= cfg_.quorum_memory_periods; });
    if (static_cast<int>(reporters.size()) < cfg_.quorum) continue;
    if (mcc_ && suspect == *mcc_) continue;
    if (blocks_.contains(suspect)) continue;
    Countermeasure c;
    c.kind = CountermeasureKind::kBlockNode;
    c.subject = suspect;
    c.issued_at = now;
    c.ttl = cfg_.block_ttl;
    blocks_[suspect] = c.expires();
    s.issued.push_back(c);
  }
  std::erase_if(named_, [](const auto& kv) { return kv.second.empty(); });

  // The most frequent attack tags this period pull matching library rules.
  int most = 0;
  for (const auto& [tag, n] : s.counts) {
    if (cfg_.rule_library.contains(tag)) most = std::max(most, n);
  }
  if (most > 0) {
    for (const auto& [tag, n] : s.counts) {
      if (n != most) continue;
      auto it = cfg_.rule_library.find(tag);
      if (it == cfg_.rule_library.end() || distributed_.contains(tag)) continue;
      distributed_.insert(tag);
      Countermeasure c;
      c.kind = CountermeasureKind::kRulesetUpdate;
      c.rule_text = it->second;
      c.issued_at = now;
      c.ttl = cfg_.block_ttl;
      s.issued.push_back(c);
    }
  }
  history_.push_back(s);
  return s;
}

std::set<NodeId> MccAggregator::blocked(SimTime now) const {
  std::set<NodeId> out;
  for (const auto& [id, exp] : blocks_) {
    if (exp > now) out.insert(id);
  }
  return out;
}

}  // namespace gemn::ids
