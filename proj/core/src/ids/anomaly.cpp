#include "gemn/ids/anomaly.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace gemn::ids {

int hour_of_day(SimTime at) {
  const std::int64_t hour_ns = 3600LL * SimTime::kTicksPerSecond;
  return static_cast<int>((at.ns() / hour_ns) % 24);
}

void SeasonalBaseline::observe(SimTime at, double avg_rate_bps) {
  samples_[static_cast<std::size_t>(hour_of_day(at))].push_back(avg_rate_bps);
}

void SeasonalBaseline::finalize() {
  for (std::size_t h = 0; h < 24; ++h) {
    const auto& s = samples_[h];
    if (s.empty()) continue;
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double dev = 0.0;
    for (double v : s) dev = std::max(dev, std::abs(v - mean));
    buckets_[h] = Expectation{mean, dev};
    trained_ = true;
  }
}

std::optional<Expectation> SeasonalBaseline::expect(SimTime at) const {
  return buckets_[static_cast<std::size_t>(hour_of_day(at))];
}

AnomalyResult anomaly_score(double avg_rate_bps, const Expectation& baseline, const AnomalyConfig& cfg) {
  AnomalyResult r;
  r.score = std::abs(avg_rate_bps - baseline.mean) / std::max(baseline.deviation, cfg.floor_bps);
  r.alert = r.score > cfg.k;
  return r;
}

std::optional<Alert> anomaly_check(const TrafficFeatures& features, const TrafficPredictor& predictor,
                                   const AnomalyConfig& cfg, NodeId reporter, double asr_bps) {
  if (!predictor.trained()) return std::nullopt;
  const auto expected = predictor.expect(features.start);
  if (!expected) return std::nullopt;
  const auto result = anomaly_score(features.avg_rate_bps, *expected, cfg);
  if (!result.alert) return std::nullopt;

  Alert a;
  a.at = features.end;
  a.detector = Detector::kAnomaly;
  a.reporter = reporter;
  a.severity = cfg.severity;
  const auto [top, share] = features.top_source();
  a.suspect = top == sim::kNoNode ? reporter : top;
  if (features.avg_rate_bps > asr_bps && asr_bps > 0.0) {
    a.tag = tags::kEnergyExhaust;
  } else if (share > 0.5) {
    a.tag = tags::kDos;
  } else {
    a.tag = tags::kDdos;
  }
  std::ostringstream ev;
  ev << "score=" << result.score << " avg_bps=" << features.avg_rate_bps << " mean_bps=" << expected->mean;
  a.evidence = ev.str();
  return a;
}

}  // namespace gemn::ids
