#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gemn/net/packet.hpp"
#include "gemn/sim/random.hpp"
#include "gemn/sim/time.hpp"

namespace gemn::traffic {

using net::AppClass;
using sim::Distribution;
using sim::SimTime;

struct AppProfile {
  AppClass app = AppClass::kSignaling;
  Distribution size_bits = sim::ConstantDist{512.0};
  Distribution interarrival_s = sim::ConstantDist{1.0};
};

struct Emission {
  SimTime at;
  std::uint32_t size_bits = 0;
};

// Renewal process: sizes and gaps drawn independently from the profile.
// The first emission lands at a random phase within one gap so sources do
// not start in lockstep.
class AppSource {
 public:
  AppSource(AppProfile profile, sim::RandomStream rng, SimTime start = {});

  [[nodiscard]] const AppProfile& profile() const { return profile_; }
  [[nodiscard]] SimTime peek() const { return next_at_; }
  Emission next();
  [[nodiscard]] std::uint64_t emitted() const { return emitted_; }

 private:
  AppProfile profile_;
  sim::RandomStream gaps_;
  sim::RandomStream sizes_;
  SimTime next_at_;
  std::uint64_t emitted_ = 0;
};

struct SignalingConfig {
  bool enabled = true;
  int sensors_per_wsr = 3;
  sim::UniformDist rate_pps{20.0, 1000.0};
  sim::UniformDist size_bits{128.0, 512.0};
};

struct TextConfig {
  bool enabled = true;
  int clients_per_wsr = 1;
  double interval_s = 10.0;
  sim::UniformDist size_bytes{200.0, 1000.0};
};

struct ImageConfig {
  bool enabled = true;
  int clients_per_wsr = 1;
  double mean_interval_s = 180.0;
  sim::UniformDist size_bytes{500'000.0, 1'000'000.0};
  std::uint32_t segment_bytes = 1500;
};

struct VideoConfig {
  bool enabled = true;
  // Every n-th WSR hosts one camera stream.
  int every_nth_wsr = 4;
  double fps = 15.0;
  sim::UniformDist bitrate_kbps{197.0, 421.0};
  double jitter = 0.2;
};

struct TrafficConfig {
  SignalingConfig signaling;
  TextConfig text;
  ImageConfig image;
  VideoConfig video;
};

void validate(const TrafficConfig& cfg);

// Sensor rate is drawn once per run and held constant.
AppProfile signaling_profile(const SignalingConfig& cfg, sim::RandomStream& rate_rng);
AppProfile text_profile(const TextConfig& cfg);
AppProfile image_profile(const ImageConfig& cfg);
// Frame-size model for a per-run target bitrate drawn from the config.
AppProfile video_profile(const VideoConfig& cfg, sim::RandomStream& rate_rng);
double video_target_kbps(const AppProfile& video);

// Splits a file into segment sizes (bits); the last segment carries the
// remainder.
std::vector<std::uint32_t> fragment(std::uint64_t file_bits, std::uint32_t segment_bytes);

// Emissions from one constant-rate sensor accumulated over a slot.
struct SensorBatch {
  std::uint32_t readings = 0;
  std::uint64_t bits = 0;
  double created_sum_s = 0.0;  // sum of creation times, for mean delay
  SimTime first_created = SimTime::max();
};

class SensorSource {
 public:
  SensorSource(const SignalingConfig& cfg, sim::RandomStream rng, SimTime start = {});

  [[nodiscard]] double rate_pps() const { return rate_pps_; }
  // Adds all readings created strictly before `until` to `batch`.
  void drain(SimTime until, SensorBatch& batch);
  [[nodiscard]] std::uint64_t emitted() const { return emitted_; }

 private:
  sim::UniformDist size_bits_;
  sim::RandomStream sizes_;
  double rate_pps_ = 0.0;
  std::int64_t period_ns_ = 0;
  SimTime next_at_;
  std::uint64_t emitted_ = 0;
};

}  // namespace gemn::traffic
