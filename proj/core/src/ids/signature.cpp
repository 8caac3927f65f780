#include "gemn/ids/signature.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace gemn::ids {

namespace {

double clipped_share(const IngressRecord& r, SimTime lo, SimTime hi) {
  if (r.span.ns() == 0) return (r.at >= lo && r.at < hi) ? 1.0 : 0.0;
  const SimTime a = std::max(r.at, lo);
  const SimTime b = std::min(r.at + r.span, hi);
  if (b <= a) return 0.0;
  return static_cast<double>((b - a).ns()) / static_cast<double>(r.span.ns());
}

bool in_scope(const Rule& rule, const IngressRecord& r, const MatchContext& ctx) {
  if (rule.proto != Proto::kAny && proto_of(r.app) != rule.proto) return false;
  return rule.src.matches(r.src, ctx.mcc) && rule.dst.matches(r.dst, ctx.mcc);
}

}  // namespace

std::vector<Alert> signature_match(std::span<const IngressRecord> window, const std::vector<Rule>& rules,
                                   const MatchContext& ctx) {
  std::vector<Alert> alerts;
  const double window_s = (ctx.end - ctx.start).seconds();
  if (window_s <= 0.0) return alerts;

  for (const auto& rule : rules) {
    double bits = 0.0;
    bool hit = false;
    std::map<NodeId, double> sources;
    for (const auto& r : window) {
      const double share = clipped_share(r, ctx.start, ctx.end);
      if (share <= 0.0 || !in_scope(rule, r, ctx)) continue;
      const double unit = r.packets ? static_cast<double>(r.bits) / r.packets : 0.0;
      bool counts = false;
      switch (rule.predicate.kind) {
        case PredicateKind::kRateAbove:
          bits += static_cast<double>(r.bits) * share;
          counts = true;
          break;
        case PredicateKind::kSizeBelow: counts = unit < rule.predicate.threshold; break;
        case PredicateKind::kSizeAbove: counts = unit > rule.predicate.threshold; break;
        case PredicateKind::kClass: counts = r.app == rule.predicate.app; break;
        case PredicateKind::kTag: counts = r.tag == rule.predicate.tag; break;
      }
      if (!counts) continue;
      if (rule.predicate.kind != PredicateKind::kRateAbove) hit = true;
      sources[r.src] += static_cast<double>(r.packets) * share;
    }
    double rate = 0.0;
    if (rule.predicate.kind == PredicateKind::kRateAbove) {
      rate = bits / window_s;
      hit = rate > rule.predicate.threshold;
    }
    if (!hit) continue;

    Alert a;
    a.at = ctx.end;
    a.detector = Detector::kSignature;
    a.tag = rule_tag(rule.id);
    a.reporter = ctx.reporter;
    a.severity = rule.severity;
    a.block_action = rule.action == RuleAction::kBlock;
    if (rule.src.kind == NodeMatch::Kind::kNode) {
      a.suspect = rule.src.id;
    } else if (rule.src.kind == NodeMatch::Kind::kMcc && ctx.mcc) {
      a.suspect = *ctx.mcc;
    } else {
      double most = -1.0;
      for (const auto& [src, n] : sources) {
        if (n > most) {
          most = n;
          a.suspect = src;
        }
      }
    }
    std::ostringstream ev;
    ev << "rule=" << rule.id;
    if (rule.predicate.kind == PredicateKind::kRateAbove) ev << " rate_bps=" << rate;
    a.evidence = ev.str();
    alerts.push_back(std::move(a));
  }
  return alerts;
}

}  // namespace gemn::ids
