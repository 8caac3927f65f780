#include <benchmark/benchmark.h>

#include "gemn/ids/rules.hpp"
#include "gemn/ids/signature.hpp"

using namespace gemn;

static void BM_SignatureMatch(benchmark::State& state) {
  const auto rules = ids::parse_rules(
      "alert udp any -> any rate>5mbps sev=3 id=flood\n"
      "alert any -> mcc size<64bits sev=2 id=tiny\n"
      "block udp any -> any tag=dos sev=4 id=tagged\n");
  std::vector<ids::IngressRecord> records;
  for (int i = 0; i < state.range(0); ++i) {
    ids::IngressRecord r;
    r.at = sim::SimTime::from_us(i * 1000);
    r.src = static_cast<net::NodeId>(i % 7);
    r.dst = 40;
    r.app = i % 3 == 0 ? net::AppClass::kVideo : net::AppClass::kText;
    r.bits = 4000;
    records.push_back(r);
  }
  const ids::MatchContext ctx{0, 40, sim::SimTime{}, sim::SimTime::from_whole_seconds(10)};
  for (auto _ : state) benchmark::DoNotOptimize(ids::signature_match(records, rules, ctx));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SignatureMatch)->Arg(1000)->Arg(10000);
