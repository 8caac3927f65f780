#include <benchmark/benchmark.h>

#include "gemn/energy/dce.hpp"

using namespace gemn::energy;

static void BM_PlanDay(benchmark::State& state) {
  const auto panel = SolarPanelModel::calibrated();
  BatteryModel battery;
  int pct = 0;
  for (auto _ : state) {
    battery.residual_fraction = pct / 100.0;
    pct = (pct + 1) % 101;
    benchmark::DoNotOptimize(plan_day(battery, 2, Weather::kCloudy, panel));
  }
}
BENCHMARK(BM_PlanDay);
