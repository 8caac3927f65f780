#include <benchmark/benchmark.h>

#include "gemn/net/olsr.hpp"
#include "gemn/net/topology.hpp"
#include "gemn/sim/random.hpp"

using namespace gemn;

static void BM_RouteComputation(benchmark::State& state) {
  net::TopologySpec spec;
  spec.placement = net::Placement::kGrid;
  spec.wsr_count = static_cast<int>(state.range(0));
  sim::RandomStream rng(1, "bench");
  const auto topo = net::build_topology(spec, net::RadioModel{}, rng);
  net::OlsrDomain domain(topo, net::OlsrTimers{});
  domain.run_until(sim::SimTime::from_whole_seconds(20));
  const auto& agent = domain.agent(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net::compute_routes(0, agent.state(), {}));
  }
}
BENCHMARK(BM_RouteComputation)->Arg(16)->Arg(40)->Arg(100);
