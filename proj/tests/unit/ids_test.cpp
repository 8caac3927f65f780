#include <gtest/gtest.h>

#include "gemn/ids/anomaly.hpp"
#include "gemn/ids/behavior.hpp"
#include "gemn/ids/features.hpp"
#include "gemn/ids/fusion.hpp"
#include "gemn/ids/mcc.hpp"
#include "gemn/ids/rules.hpp"
#include "gemn/ids/signature.hpp"
#include "gemn/sim/random.hpp"

using namespace gemn;
using namespace gemn::ids;

namespace {

IngressRecord rec(double at_s, double span_s, NodeId src, std::uint32_t packets, std::uint64_t bits,
                  AppClass app = AppClass::kSignaling) {
  IngressRecord r;
  r.at = SimTime::from_seconds(at_s);
  r.span = SimTime::from_seconds(span_s);
  r.src = src;
  r.dst = 99;
  r.prev = src;
  r.app = app;
  r.packets = packets;
  r.bits = bits;
  return r;
}

const SimTime k0{};
const SimTime k10 = SimTime::from_whole_seconds(10);

}  // namespace

TEST(Features, RatesBinsAndTopSource) {
  const std::vector<IngressRecord> w{rec(0, 10, 1, 100, 10'000'000), rec(2, 0, 2, 1, 1000), rec(9.5, 1, 3, 2, 2000)};
  const auto f = extract_features(w, k0, k10);
  // record 3 is clipped to half
  EXPECT_NEAR(f.avg_rate_bps, (10e6 + 1000 + 1000) / 10.0, 1e-6);
  ASSERT_EQ(f.bin_rates_bps.size(), 10u);
  EXPECT_NEAR(f.bin_rates_bps[2], 1e6 + 1000, 1e-6);
  EXPECT_NEAR(f.bin_rates_bps[9], 1e6 + 1000, 1e-6);
  EXPECT_NEAR(f.peak_rate_bps, 1e6 + 1000, 1e-6);
  EXPECT_EQ(f.total_packets, 102u);
  const auto [top, share] = f.top_source();
  EXPECT_EQ(top, 1u);
  EXPECT_NEAR(share, 100.0 / 102.0, 1e-12);
}

TEST(Features, BurstJoinsCloseRecords) {
  // two back-to-back packed records then an isolated packet
  const std::vector<IngressRecord> w{rec(1.0, 0.01, 1, 100, 50'000), rec(1.0104, 0.01, 1, 100, 50'000),
                                     rec(5.0, 0, 2, 1, 300)};
  const auto f = extract_features(w, k0, k10);
  EXPECT_NEAR(f.burst_size_bits, 100'000.0, 1e-6);
}

TEST(Features, EmptyWindowAndBadWindow) {
  const auto f = extract_features({}, k0, k10);
  EXPECT_EQ(f.avg_rate_bps, 0.0);
  EXPECT_EQ(f.top_source().first, sim::kNoNode);
  EXPECT_THROW(extract_features({}, k10, k0), std::invalid_argument);
}

TEST(Features, ConservesBitsUnderRandomSplits) {
  sim::RandomStream r(5, "features");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<IngressRecord> w;
    double inside = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double at = r.uniform(0.0, 9.0);
      const double span = r.uniform(0.0, 1.0);
      const auto bits = static_cast<std::uint64_t>(r.uniform_int(1, 100000));
      w.push_back(rec(at, span, static_cast<NodeId>(i % 4), 10, bits));
      inside += static_cast<double>(bits);
    }
    const auto f = extract_features(w, k0, k10);
    double binned = 0.0;
    for (double b : f.bin_rates_bps) binned += b;
    ASSERT_NEAR(binned, inside, inside * 1e-9);
    ASSERT_NEAR(f.avg_rate_bps * 10.0, inside, inside * 1e-9);
    ASSERT_LE(f.burst_size_bits, inside + 1e-6);
  }
}

TEST(Rules, ParsesGrammarAndRoundTrips) {
  const auto rules = parse_rules(
      "# comment\n"
      "\n"
      "alert udp any -> any rate>15mbps sev=3 id=udp-flood\n"
      "block wsr5 -> mcc size<64byte sev=5 id=tiny\n"
      "alert tcp node3 -> any class=image sev=1 id=img\n"
      "alert any -> wsr2 tag=dos sev=2 id=tagged\n");
  ASSERT_EQ(rules.size(), 4u);
  EXPECT_EQ(rules[0].proto, Proto::kUdp);
  EXPECT_DOUBLE_EQ(rules[0].predicate.threshold, 15e6);
  EXPECT_EQ(rules[0].line, 3);
  EXPECT_EQ(rules[1].action, RuleAction::kBlock);
  EXPECT_EQ(rules[1].src.kind, NodeMatch::Kind::kNode);
  EXPECT_EQ(rules[1].src.id, 5u);
  EXPECT_EQ(rules[1].dst.kind, NodeMatch::Kind::kMcc);
  EXPECT_EQ(rules[1].predicate.kind, PredicateKind::kSizeBelow);
  EXPECT_DOUBLE_EQ(rules[1].predicate.threshold, 512.0);
  EXPECT_EQ(rules[2].predicate.app, AppClass::kImage);
  EXPECT_EQ(rules[3].predicate.tag, "dos");
  for (const auto& r : rules) {
    const auto again = parse_rules(format_rule(r));
    ASSERT_EQ(again.size(), 1u);
    EXPECT_EQ(format_rule(again[0]), format_rule(r));
    EXPECT_EQ(again[0].id, r.id);
    EXPECT_EQ(again[0].severity, r.severity);
    EXPECT_DOUBLE_EQ(again[0].predicate.threshold, r.predicate.threshold);
  }
}

TEST(Rules, ErrorsCarryLineAndColumn) {
  struct Case {
    const char* text;
    int line;
    int column;
  };
  const Case cases[] = {
      {"alert any any rate>1mbps sev=1 id=x", 1, 36},
      {"warn any -> any rate>1mbps sev=1 id=x", 1, 1},
      {"\nalert any -> any rate>1furlong sev=1 id=x", 2, 24},
      {"alert any -> any rate>1mbps sev=9 id=x", 1, 33},
      {"alert any -> any rate>1mbps sev=1", 1, 34},
      {"alert any -> any rate>1mbps sev=1 id=a/b", 1, 39},
      {"alert any -> any jitter>3 sev=1 id=x", 1, 18},
      {"alert icmp any -> any rate>1mbps sev=1 id=x", 1, 7},
  };
  for (const auto& c : cases) {
    try {
      parse_rules(c.text);
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const RuleParseError& e) {
      EXPECT_EQ(e.line(), c.line) << c.text;
      EXPECT_EQ(e.column(), c.column) << c.text << " -> " << e.what();
    }
  }
}

TEST(Signature, RateRuleFiresAboveThresholdOnly) {
  const auto rules = parse_rules("alert udp any -> any rate>5mbps sev=3 id=r5");
  MatchContext ctx{4, std::nullopt, k0, k10};
  const std::vector<IngressRecord> hot{rec(0, 10, 1, 1000, 77'500'000), rec(0, 10, 2, 10, 100)};
  const auto alerts = signature_match(hot, rules, ctx);
  ASSERT_EQ(alerts.size(), 1u);
  EXPECT_EQ(alerts[0].tag, "rule:r5");
  EXPECT_EQ(alerts[0].suspect, 1u);
  EXPECT_EQ(alerts[0].reporter, 4u);
  const std::vector<IngressRecord> cool{rec(0, 10, 1, 1000, 40'000'000)};
  EXPECT_TRUE(signature_match(cool, rules, ctx).empty());
  // TCP traffic is out of scope for a udp rule
  const std::vector<IngressRecord> tcp{rec(0, 10, 1, 1000, 77'500'000, AppClass::kImage)};
  EXPECT_TRUE(signature_match(tcp, rules, ctx).empty());
}

TEST(Signature, SpecificSourceBecomesSuspectAndBlockFlagCarries) {
  const auto rules = parse_rules("block node7 -> any size>100bit sev=2 id=big");
  MatchContext ctx{4, std::nullopt, k0, k10};
  const std::vector<IngressRecord> w{rec(1, 0, 7, 1, 200), rec(1, 0, 8, 1, 200)};
  const auto alerts = signature_match(w, rules, ctx);
  ASSERT_EQ(alerts.size(), 1u);
  EXPECT_EQ(alerts[0].suspect, 7u);
  EXPECT_TRUE(alerts[0].block_action);
  EXPECT_TRUE(actionable(alerts[0], FusionConfig{}));
}

TEST(Anomaly, SeasonalBaselineScores) {
  SeasonalBaseline b;
  EXPECT_FALSE(b.trained());
  for (int i = 0; i < 10; ++i) b.observe(SimTime::from_whole_seconds(3600 * 5 + i * 10), 1e6 + (i % 2 ? 5e4 : -5e4));
  b.finalize();
  ASSERT_TRUE(b.trained());
  const auto e = b.expect(SimTime::from_whole_seconds(3600 * 5 + 86400));
  ASSERT_TRUE(e.has_value());
  EXPECT_NEAR(e->mean, 1e6, 1e-6);
  EXPECT_NEAR(e->deviation, 5e4, 1e-6);
  EXPECT_FALSE(b.expect(SimTime::from_whole_seconds(3600 * 6)).has_value());

  AnomalyConfig cfg;
  EXPECT_NEAR(anomaly_score(1.2e6, *e, cfg).score, 4.0, 1e-12);
  EXPECT_FALSE(anomaly_score(1.2e6, *e, cfg).alert);
  EXPECT_TRUE(anomaly_score(1.21e6, *e, cfg).alert);
  // the floor stops a flat baseline from flagging noise
  EXPECT_NEAR(anomaly_score(1.02e6, Expectation{1e6, 0.0}, cfg).score, 2.0, 1e-12);
}

TEST(Anomaly, TagsByRateAndSourceMix) {
  SeasonalBaseline b;
  b.observe(k0, 1e5);
  b.finalize();
  AnomalyConfig cfg;
  const std::vector<IngressRecord> one{rec(0, 10, 3, 900, 30'000'000), rec(0, 10, 4, 100, 100)};
  auto f = extract_features(one, k0, k10);
  auto a = anomaly_check(f, b, cfg, 1, 2e6);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->tag, tags::kEnergyExhaust);
  EXPECT_EQ(a->suspect, 3u);
  EXPECT_TRUE(mapping_allows(*a));
  a = anomaly_check(f, b, cfg, 1, 18e6);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->tag, tags::kDos);
  const std::vector<IngressRecord> many{rec(0, 10, 3, 300, 10'000'000), rec(0, 10, 4, 300, 10'000'000),
                                        rec(0, 10, 5, 300, 10'000'000)};
  f = extract_features(many, k0, k10);
  a = anomaly_check(f, b, cfg, 1, 18e6);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->tag, tags::kDdos);
  EXPECT_FALSE(anomaly_check(f, SeasonalBaseline{}, cfg, 1, 18e6).has_value());
}

TEST(Behavior, BlackholeThresholdAndMinimumTransit) {
  BehaviorConfig cfg;
  EXPECT_FALSE(blackhole_check(1, 2, {49, 0}, cfg, k0).has_value());
  EXPECT_TRUE(blackhole_check(1, 2, {50, 9}, cfg, k0).has_value());
  EXPECT_FALSE(blackhole_check(1, 2, {50, 10}, cfg, k0).has_value());
  const auto a = blackhole_check(1, 2, {100, 0}, cfg, k10);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->tag, tags::kBlackhole);
  EXPECT_EQ(a->suspect, 2u);
  EXPECT_TRUE(mapping_allows(*a));
}

TEST(Behavior, MonitorBucketsAndPrunes) {
  ForwardingMonitor m;
  m.handed(2, 5, 10);
  m.forwarded(2, 5, 4);
  m.handed(3, 6);
  EXPECT_EQ(m.stats(2, 5).handed, 10u);
  EXPECT_DOUBLE_EQ(m.stats(2, 5).ratio(), 0.4);
  EXPECT_DOUBLE_EQ(m.stats(2, 6).ratio(), 1.0);
  m.prune(6);
  EXPECT_EQ(m.stats(2, 5).handed, 0u);
  EXPECT_EQ(m.neighbors(), (std::vector<NodeId>{3}));
}

TEST(Behavior, EnergyExhaustNeedsSustainedExcess) {
  BehaviorConfig cfg;
  EnergyExhaustMonitor m;
  const double asr = 2e6;
  for (int s = 0; s < 29; ++s) {
    EXPECT_FALSE(m.feed(SimTime::from_whole_seconds(s), 3.1e6, asr, 1, 2, cfg).has_value());
  }
  const auto a = m.feed(SimTime::from_whole_seconds(29), 3.1e6, asr, 1, 2, cfg);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->at, SimTime::from_whole_seconds(30));
  EXPECT_FALSE(m.feed(SimTime::from_whole_seconds(30), 3.1e6, asr, 1, 2, cfg).has_value());
  // a dip resets the run
  m.feed(SimTime::from_whole_seconds(31), 2.9e6, asr, 1, 2, cfg);
  EXPECT_EQ(m.run_length(), 0);
}

TEST(Fusion, BlocksActionableSuspectsOnly) {
  Alert low{k0, Detector::kSignature, "rule:x", 1, 5, 2};
  Alert high{k0, Detector::kSignature, "rule:y", 1, 6, 3};
  Alert behav{k0, Detector::kBehavior, tags::kBlackhole, 1, 7, 1};
  Alert self{k0, Detector::kBehavior, tags::kBlackhole, 1, 1, 4};
  Alert mcc{k0, Detector::kBehavior, tags::kBlackhole, 1, 40, 4};
  const std::vector<Alert> all{low, high, behav, self, mcc, high};
  EXPECT_EQ(fuse(all, 1, 40, FusionConfig{}), (std::vector<NodeId>{6, 7}));
}

TEST(Fusion, ReportRanksSuspects) {
  ReportBuilder b(1);
  Alert a{k0, Detector::kBehavior, tags::kBlackhole, 1, 7, 4};
  Alert c{k0, Detector::kBehavior, tags::kBlackhole, 1, 8, 4};
  b.add(c, true);
  b.add(a, true);
  b.add(a, true);
  b.add_block(7);
  EXPECT_EQ(b.pending(), 3);
  const auto r = b.take(2, false);
  EXPECT_EQ(r.total(), 3);
  EXPECT_EQ(r.top_suspects, (std::vector<NodeId>{7, 8}));
  EXPECT_EQ(r.local_blocks, std::vector<NodeId>{7});
  EXPECT_EQ(b.pending(), 0);
}

TEST(Mcc, QuorumWithinMemoryBlocksOnce) {
  MccConfig cfg;
  cfg.rule_library = default_rule_library();
  MccAggregator mcc(cfg, 40);
  auto report = [](NodeId reporter, std::int64_t period, std::vector<NodeId> suspects, std::string tag) {
    SecurityReport r;
    r.reporter = reporter;
    r.period = period;
    r.counts[tag] = 1;
    r.top_suspects = std::move(suspects);
    return r;
  };
  const auto t = [](int p) { return SimTime::from_whole_seconds(60 * p); };

  std::vector<SecurityReport> p0{report(1, 0, {9}, tags::kBlackhole)};
  auto s = mcc.aggregate(0, p0, t(0));
  EXPECT_TRUE(s.issued.empty());

  // second reporter four periods later: still inside the memory
  std::vector<SecurityReport> p4{report(2, 4, {9}, tags::kBlackhole)};
  s = mcc.aggregate(4, p4, t(4));
  ASSERT_EQ(s.issued.size(), 1u);
  EXPECT_EQ(s.issued[0].kind, CountermeasureKind::kBlockNode);
  EXPECT_EQ(s.issued[0].subject, 9u);
  EXPECT_EQ(mcc.blocked(t(5)), std::set<NodeId>{9});
  s = mcc.aggregate(5, p4, t(5));
  EXPECT_TRUE(s.issued.empty());

  // reports five periods apart never meet
  MccAggregator fresh(cfg, 40);
  std::vector<SecurityReport> q0{report(1, 0, {11}, tags::kBlackhole)};
  std::vector<SecurityReport> q5{report(2, 5, {11}, tags::kBlackhole)};
  fresh.aggregate(0, q0, t(0));
  EXPECT_TRUE(fresh.aggregate(5, q5, t(5)).issued.empty());

  // the MCC itself is never blocked
  MccAggregator guard(cfg, 40);
  std::vector<SecurityReport> both{report(1, 0, {40}, tags::kBlackhole), report(2, 0, {40}, tags::kBlackhole)};
  EXPECT_TRUE(guard.aggregate(0, both, t(0)).issued.empty());
}

TEST(Mcc, DistributesRuleForDominantTagOnce) {
  MccConfig cfg;
  cfg.rule_library = default_rule_library();
  MccAggregator mcc(cfg, std::nullopt);
  SecurityReport r;
  r.reporter = 1;
  r.counts = {{tags::kDos, 3}, {tags::kBlackhole, 1}};
  std::vector<SecurityReport> reports{r};
  auto s = mcc.aggregate(0, reports, k0);
  ASSERT_EQ(s.issued.size(), 1u);
  EXPECT_EQ(s.issued[0].kind, CountermeasureKind::kRulesetUpdate);
  EXPECT_EQ(parse_rules(s.issued[0].rule_text).size(), 1u);
  s = mcc.aggregate(1, reports, k10);
  EXPECT_TRUE(s.issued.empty());
  for (const auto& [tag, text] : default_rule_library()) EXPECT_NO_THROW(parse_rules(text)) << tag;
}

TEST(Mcc, BlocksExpireAfterTtl) {
  MccConfig cfg;
  cfg.block_ttl = SimTime::from_whole_seconds(100);
  MccAggregator mcc(cfg, std::nullopt);
  SecurityReport a, b;
  a.reporter = 1;
  b.reporter = 2;
  a.top_suspects = b.top_suspects = {5};
  std::vector<SecurityReport> reports{a, b};
  mcc.aggregate(0, reports, k0);
  EXPECT_EQ(mcc.blocked(SimTime::from_whole_seconds(99)), std::set<NodeId>{5});
  EXPECT_TRUE(mcc.blocked(SimTime::from_whole_seconds(100)).empty());
}
