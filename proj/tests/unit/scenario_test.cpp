#include <gtest/gtest.h>

#include "gemn/harness/scenario.hpp"

using namespace gemn;
using namespace gemn::harness;

TEST(Scenario, EmptyObjectGivesDefaults) {
  const auto c = parse_scenario("{}");
  EXPECT_EQ(c.label, "default");
  EXPECT_EQ(c.topology.wsr_count, 40);
  EXPECT_DOUBLE_EQ(c.radio.range_m, 300.0);
  EXPECT_DOUBLE_EQ(c.radio.data_rate_mbps, 18.0);
  EXPECT_DOUBLE_EQ(c.battery.capacity_mAh, 2800.0);
  EXPECT_EQ(c.wsr_defaults.panels, 2);
  EXPECT_DOUBLE_EQ(c.echids.window_s, 10.0);
  EXPECT_FALSE(c.echids.mcc.rule_library.empty());
  EXPECT_EQ(c.dos_sweep.multipliers, (std::vector<double>{1, 2, 5, 10}));
}

TEST(Scenario, UnknownKeysAreRejectedWithPath) {
  try {
    parse_scenario(R"({"topology": {"wsr_cnt": 4}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "topology.wsr_cnt");
  }
  EXPECT_THROW(parse_scenario(R"({"horizon_s": "long"})"), ConfigError);
  EXPECT_THROW(parse_scenario("{not json"), ConfigError);
}

TEST(Scenario, JsonRoundTripIsStable) {
  auto c = parse_scenario(R"({"label": "rt", "seed": 9, "weather": ["rainy", "cloudy"],
                              "wsr_overrides": [{"id": 3, "panels": 1}],
                              "attacks": [{"kind": "blackhole", "target": 2, "start_s": 30}]})");
  const auto j = scenario_to_json(c);
  const auto again = scenario_from_json(j);
  EXPECT_EQ(scenario_to_json(again), j);
  EXPECT_EQ(again.weather.size(), 2u);
  EXPECT_EQ(again.attacks.at(0).kind, traffic::AttackKind::kBlackHole);
  EXPECT_EQ(again.attacks.at(0).start, sim::SimTime::from_whole_seconds(30));
  EXPECT_EQ(again.wsr_overrides.at(0).panels, 1);
}

TEST(Scenario, OverridesUseDottedKeysAndAliases) {
  auto c = parse_scenario("{}");
  apply_override(c, "link_rate=11");
  EXPECT_DOUBLE_EQ(c.radio.data_rate_mbps, 11.0);
  apply_override(c, "echids.window_s=5");
  EXPECT_DOUBLE_EQ(c.echids.window_s, 5.0);
  apply_override(c, "label=renamed");
  EXPECT_EQ(c.label, "renamed");
  try {
    apply_override(c, "echids.nope=1");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "echids.nope");
  }
  EXPECT_THROW(apply_override(c, "=3"), ConfigError);
}

TEST(Scenario, CrossFieldValidation) {
  auto c = parse_scenario(R"({"topology": {"wsr_count": 4}})");
  EXPECT_NO_THROW(validate(c));
  c.attacks.push_back({});
  c.attacks.back().target = 4;
  try {
    validate(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "attacks[0].target");
  }
  c.attacks.clear();
  c.echids.report_period_s = 1.0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Scenario, ShippedScenariosLoad) {
  for (const char* name : {"default", "blackhole", "dos", "clean_trained"}) {
    const auto c = load_scenario(std::string(GEMN_SOURCE_DIR) + "/scenarios/" + name + ".json");
    EXPECT_NO_THROW(validate(c)) << name;
    EXPECT_EQ(c.label, name);
  }
}
