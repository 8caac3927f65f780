#include <gtest/gtest.h>

#include "gemn/harness/simulation.hpp"

using namespace gemn;
using namespace gemn::harness;

namespace {

ScenarioConfig small(int wsrs, double horizon_s) {
  auto c = parse_scenario("{}");
  c.label = "small";
  c.topology.wsr_count = wsrs;
  c.horizon_s = horizon_s;
  c.traffic.image.mean_interval_s = 20.0;
  validate(c);
  return c;
}

}  // namespace

TEST(Simulation, SmallRunConservesPacketsAndCharge) {
  const auto r = run_simulation(small(9, 120));
  const auto& s = r.summary;
  EXPECT_TRUE(s.packets_conserved()) << metrics::format_summary(s);
  EXPECT_LT(s.max_energy_residual, 1e-9);
  ASSERT_TRUE(s.packets_by_app.count("signaling"));
  EXPECT_GT(s.packets_by_app.at("signaling").delivered, 0u);
  EXPECT_GT(s.packets_by_app.at("text").generated, 0u);
  EXPECT_EQ(r.battery.size(), 9u);
  EXPECT_EQ(s.nodes.size(), 10u);  // nine routers and the MCC
  EXPECT_TRUE(r.alerts.empty());
  EXPECT_EQ(s.delivered_through_blocked, 0u);
}

TEST(Simulation, SameConfigSameResult) {
  const auto c = small(6, 60);
  const auto a = run_simulation(c);
  const auto b = run_simulation(c);
  EXPECT_EQ(metrics::format_summary(a.summary), metrics::format_summary(b.summary));
  EXPECT_EQ(a.topology_dump, b.topology_dump);
  auto d = c;
  d.seed = 2;
  const auto other = run_simulation(d);
  EXPECT_NE(metrics::format_summary(a.summary), metrics::format_summary(other.summary));
}

TEST(Simulation, SingleRouterWithoutMcc) {
  auto c = small(1, 30);
  c.topology.include_mcc = false;
  const auto r = run_simulation(c);
  EXPECT_TRUE(r.summary.packets_conserved());
  EXPECT_EQ(r.summary.nodes.size(), 1u);
}

TEST(Simulation, UnmanagedRouterDrainsFaster) {
  auto managed = small(4, 120);
  managed.wsr_defaults.panels = 0;
  auto unmanaged = managed;
  unmanaged.node.managed = false;
  const auto m = run_simulation(managed);
  const auto u = run_simulation(unmanaged);
  double m_left = 0.0, u_left = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    m_left += m.summary.nodes[i].final_fraction;
    u_left += u.summary.nodes[i].final_fraction;
  }
  EXPECT_LT(u_left, m_left);
}

TEST(Simulation, InlineRulesAreAppendedAndApplied) {
  auto c = small(4, 60);
  c.echids.rules = "alert udp any -> any rate>1bps sev=1 id=anything\n";
  const auto rules = load_rules(c);
  ASSERT_EQ(rules.size(), 1u);
  const auto r = run_simulation(c, rules);
  ASSERT_FALSE(r.alerts.empty());
  for (const auto& a : r.alerts) EXPECT_EQ(a.tag, "rule:anything");
  // severity 1 is below the block threshold: no blocks anywhere
  EXPECT_TRUE(r.summary.network_blocks.empty());
}
