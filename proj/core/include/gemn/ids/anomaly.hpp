#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gemn/ids/alert.hpp"
#include "gemn/ids/features.hpp"

namespace gemn::ids {

struct Expectation {
  double mean = 0.0;
  double deviation = 0.0;
};

// Learns normal per-window rates and predicts the expected rate for a time
// of day. The seasonal baseline below is the default; other predictors can
// be plugged in behind this interface.
class TrafficPredictor {
 public:
  virtual ~TrafficPredictor() = default;
  virtual void observe(SimTime at, double avg_rate_bps) = 0;
  virtual void finalize() = 0;
  [[nodiscard]] virtual bool trained() const = 0;
  [[nodiscard]] virtual std::optional<Expectation> expect(SimTime at) const = 0;
};

// Hour-of-day mean, with the deviation taken as the largest absolute
// departure from that mean seen during training.
class SeasonalBaseline final : public TrafficPredictor {
 public:
  void observe(SimTime at, double avg_rate_bps) override;
  void finalize() override;
  [[nodiscard]] bool trained() const override { return trained_; }
  [[nodiscard]] std::optional<Expectation> expect(SimTime at) const override;
  [[nodiscard]] std::size_t samples(int hour) const { return samples_.at(static_cast<std::size_t>(hour)).size(); }

 private:
  std::array<std::vector<double>, 24> samples_;
  std::array<std::optional<Expectation>, 24> buckets_;
  bool trained_ = false;
};

int hour_of_day(SimTime at);

struct AnomalyConfig {
  double k = 4.0;
  double floor_bps = 10'000.0;
  int severity = 2;
};

struct AnomalyResult {
  double score = 0.0;
  bool alert = false;
};

AnomalyResult anomaly_score(double avg_rate_bps, const Expectation& baseline, const AnomalyConfig& cfg);

// Evaluates one window; tags the alert energy_exhaust when the rate exceeds
// the node's ASR, dos when one source dominates, ddos otherwise.
std::optional<Alert> anomaly_check(const TrafficFeatures& features, const TrafficPredictor& predictor,
                                   const AnomalyConfig& cfg, NodeId reporter, double asr_bps);

}  // namespace gemn::ids
