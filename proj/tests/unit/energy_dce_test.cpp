#include <gtest/gtest.h>

#include <cstdint>

#include "gemn/energy/dce.hpp"

using namespace gemn::energy;

namespace {

// Integer-only reconstruction of a planner row. AE is in mAh, ASR and ASP
// are returned in hundredths after half-up rounding.
struct Cells {
  std::int64_t ae;
  std::int64_t asr_x100;
  std::int64_t asp_x100;
};

Cells oracle(int re_pct, int panels, std::int64_t yield) {
  const std::int64_t ae = 2800 * re_pct / 100 + panels * yield;
  // ASR = AE / 640, half-up to 2 places: floor((200 AE + 640) / 1280)
  const std::int64_t asr = (200 * ae + 640) / 1280;
  // ASP = 1 - AE / (640 * 18); in hundredths = (1152000 - 100 AE) / 11520
  const std::int64_t num = 2 * (1152000 - 100 * ae) + 11520;
  const std::int64_t asp = num / (2 * 11520);
  return {ae, asr, asp};
}

std::int64_t yield_of(Weather w) {
  switch (w) {
    case Weather::kSunny: return 2160;
    case Weather::kCloudy: return 1001;
    case Weather::kRainy: return 682;
  }
  return 0;
}

}  // namespace

TEST(Dce, AllRowsMatchIntegerOracle) {
  const auto panel = SolarPanelModel::calibrated();
  for (int n : {1, 2}) {
    for (int re : {100, 75, 50, 25}) {
      for (Weather w : kAllWeather) {
        BatteryModel b;
        b.residual_fraction = re / 100.0;
        const auto plan = plan_day(b, n, w, panel);
        const auto want = oracle(re, n, yield_of(w));
        SCOPED_TRACE(std::to_string(re) + "% N=" + std::to_string(n) + " " + std::string(to_string(w)));
        EXPECT_DOUBLE_EQ(plan.available_energy_mAh, static_cast<double>(want.ae));
        EXPECT_NEAR(round_half_up(plan.asr_mbps, 2) * 100.0, static_cast<double>(want.asr_x100), 1e-6);
        EXPECT_NEAR(round_half_up(plan.asp_s, 2) * 100.0, static_cast<double>(want.asp_x100), 1e-6);
      }
    }
  }
}

TEST(Dce, PublishedSpotChecks) {
  const auto panel = SolarPanelModel::calibrated();
  BatteryModel full;
  auto p = plan_day(full, 1, Weather::kSunny, panel);
  EXPECT_DOUBLE_EQ(p.available_energy_mAh, 4960.0);
  EXPECT_DOUBLE_EQ(round_half_up(p.asr_mbps, 2), 7.75);
  EXPECT_DOUBLE_EQ(round_half_up(p.asp_s, 2), 0.57);

  BatteryModel quarter;
  quarter.residual_fraction = 0.25;
  p = plan_day(quarter, 2, Weather::kRainy, panel);
  EXPECT_DOUBLE_EQ(p.available_energy_mAh, 2064.0);
  EXPECT_DOUBLE_EQ(round_half_up(p.asr_mbps, 2), 3.23);
  EXPECT_DOUBLE_EQ(round_half_up(p.asp_s, 2), 0.82);
}

TEST(Dce, HalfUpRoundingOfDecimalTies) {
  // 7120 / 640 = 11.125 exactly; half-up gives 11.13 where banker's gives 11.12
  EXPECT_DOUBLE_EQ(round_half_up(7120.0 / 640.0, 2), 11.13);
  EXPECT_DOUBLE_EQ(round_half_up(0.125, 2), 0.13);
  EXPECT_DOUBLE_EQ(round_half_up(2.5, 0), 3.0);
}

TEST(Dce, DivisorFromCurrents) {
  EXPECT_DOUBLE_EQ(dce_divisor(CurrentProfile{}, 18.0), 640.0);
}

TEST(Dce, AsrIsCappedAtLinkRateAndAspClamped) {
  EXPECT_DOUBLE_EQ(estimate_asr(1e6, 640.0, 18.0), 18.0);
  EXPECT_DOUBLE_EQ(estimate_asp(18.0, 18.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(estimate_asp(0.0, 18.0, 1.0), 1.0);
}

TEST(Dce, EmptyBatteryAndNoPanelsSleepsAllSlot) {
  BatteryModel empty;
  empty.residual_fraction = 0.0;
  const auto p = plan_day(empty, 0, Weather::kRainy, SolarPanelModel::calibrated());
  EXPECT_DOUBLE_EQ(p.asr_mbps, 0.0);
  EXPECT_DOUBLE_EQ(p.asp_s, 1.0);
  EXPECT_DOUBLE_EQ(p.active_s, 0.0);
}

TEST(Sizing, PanelCountsAndLifetimes) {
  const auto panel = SolarPanelModel::calibrated();
  // 24 * 150 / 682 = 5.28 -> 6 ; 24 * 70 / 682 = 2.46 -> 3
  EXPECT_EQ(size_solar_array(150.0, panel, Weather::kRainy), 6);
  EXPECT_EQ(size_solar_array(70.0, panel, Weather::kRainy), 3);
  EXPECT_EQ(size_solar_array(90.0, panel, Weather::kSunny), 1);
  EXPECT_NEAR(battery_life(2800, 150, 0.8), 2800 * 0.8 / 150, 1e-12);
  EXPECT_NEAR(battery_life(2800, 70, 0.8), 32.0, 1e-12);
  EXPECT_THROW(battery_life(2800, 0, 0.8), std::invalid_argument);
}

TEST(Weather, ParseRoundTrip) {
  for (Weather w : kAllWeather) EXPECT_EQ(parse_weather(to_string(w)), w);
  EXPECT_FALSE(parse_weather("foggy").has_value());
}
