#include <benchmark/benchmark.h>

#include "gemn/sim/engine.hpp"

using namespace gemn::sim;

static void BM_EngineScheduleRun(benchmark::State& state) {
  const auto n = state.range(0);
  for (auto _ : state) {
    Engine engine;
    for (std::int64_t i = 0; i < n; ++i) {
      engine.schedule(SimTime::from_us((i * 7919) % 100000), EventKind::kTimer, 0, static_cast<std::uint64_t>(i));
    }
    std::uint64_t sum = 0;
    engine.run_until(SimTime::from_whole_seconds(1), [&](const SimEvent& e) { sum += e.payload; });
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EngineScheduleRun)->Arg(1000)->Arg(100000);
