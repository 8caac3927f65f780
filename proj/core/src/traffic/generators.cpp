#include "gemn/traffic/generators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gemn::traffic {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_range(const sim::UniformDist& d, double lo_floor, const std::string& what) {
  require(d.a >= lo_floor && d.b >= d.a, what + " must satisfy " + std::to_string(lo_floor) + " <= min <= max");
}

}  // namespace

void validate(const TrafficConfig& cfg) {
  require(cfg.signaling.sensors_per_wsr >= 0, "signaling.sensors_per_wsr must be nonnegative");
  require_range(cfg.signaling.rate_pps, 1e-9, "signaling.rate_pps");
  require_range(cfg.signaling.size_bits, 1.0, "signaling.size_bits");
  require(cfg.text.clients_per_wsr >= 0, "text.clients_per_wsr must be nonnegative");
  require(cfg.text.interval_s > 0.0, "text.interval_s must be positive");
  require_range(cfg.text.size_bytes, 1.0, "text.size_bytes");
  require(cfg.image.clients_per_wsr >= 0, "image.clients_per_wsr must be nonnegative");
  require(cfg.image.mean_interval_s > 0.0, "image.mean_interval_s must be positive");
  require_range(cfg.image.size_bytes, 1.0, "image.size_bytes");
  require(cfg.image.segment_bytes > 0, "image.segment_bytes must be positive");
  require(cfg.video.every_nth_wsr >= 0, "video.every_nth_wsr must be nonnegative");
  require(cfg.video.fps > 0.0, "video.fps must be positive");
  require_range(cfg.video.bitrate_kbps, 1e-9, "video.bitrate_kbps");
  require(cfg.video.jitter >= 0.0 && cfg.video.jitter < 1.0, "video.jitter must lie in [0, 1)");
}

AppSource::AppSource(AppProfile profile, sim::RandomStream rng, SimTime start)
    : profile_{std::move(profile)}, gaps_{rng.split("gap")}, sizes_{rng.split("size")} {
  sim::validate(profile_.size_bits);
  sim::validate(profile_.interarrival_s);
  const double first_gap = next_random(gaps_, profile_.interarrival_s);
  next_at_ = start + SimTime::from_seconds(first_gap * gaps_.next_unit());
}

Emission AppSource::next() {
  Emission e;
  e.at = next_at_;
  const double bits = std::round(next_random(sizes_, profile_.size_bits));
  e.size_bits = static_cast<std::uint32_t>(std::max(1.0, bits));
  next_at_ = next_at_ + SimTime::from_seconds(next_random(gaps_, profile_.interarrival_s));
  ++emitted_;
  return e;
}

AppProfile signaling_profile(const SignalingConfig& cfg, sim::RandomStream& rate_rng) {
  const double rate = rate_rng.uniform(cfg.rate_pps.a, cfg.rate_pps.b);
  return AppProfile{AppClass::kSignaling, cfg.size_bits, sim::ConstantDist{1.0 / rate}};
}

AppProfile text_profile(const TextConfig& cfg) {
  return AppProfile{AppClass::kText, sim::UniformDist{cfg.size_bytes.a * 8.0, cfg.size_bytes.b * 8.0},
                    sim::ConstantDist{cfg.interval_s}};
}

AppProfile image_profile(const ImageConfig& cfg) {
  return AppProfile{AppClass::kImage, sim::UniformDist{cfg.size_bytes.a * 8.0, cfg.size_bytes.b * 8.0},
                    sim::ExponentialDist{cfg.mean_interval_s}};
}

AppProfile video_profile(const VideoConfig& cfg, sim::RandomStream& rate_rng) {
  const double kbps = rate_rng.uniform(cfg.bitrate_kbps.a, cfg.bitrate_kbps.b);
  const double frame_bits = kbps * 1000.0 / cfg.fps;
  return AppProfile{AppClass::kVideo,
                    sim::UniformDist{frame_bits * (1.0 - cfg.jitter), frame_bits * (1.0 + cfg.jitter)},
                    sim::ConstantDist{1.0 / cfg.fps}};
}

double video_target_kbps(const AppProfile& video) {
  return sim::mean_of(video.size_bits) / sim::mean_of(video.interarrival_s) / 1000.0;
}

std::vector<std::uint32_t> fragment(std::uint64_t file_bits, std::uint32_t segment_bytes) {
  if (segment_bytes == 0) throw std::invalid_argument("segment size must be positive");
  const std::uint64_t seg = static_cast<std::uint64_t>(segment_bytes) * 8;
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(file_bits / seg + 1));
  for (std::uint64_t left = file_bits; left > 0;) {
    const std::uint64_t take = std::min(left, seg);
    out.push_back(static_cast<std::uint32_t>(take));
    left -= take;
  }
  return out;
}

SensorSource::SensorSource(const SignalingConfig& cfg, sim::RandomStream rng, SimTime start)
    : size_bits_{cfg.size_bits}, sizes_{rng.split("size")} {
  auto rate_rng = rng.split("rate");
  rate_pps_ = rate_rng.uniform(cfg.rate_pps.a, cfg.rate_pps.b);
  period_ns_ = std::max<std::int64_t>(1, std::llround(1e9 / rate_pps_));
  auto phase_rng = rng.split("phase");
  next_at_ = start + SimTime::from_ns(phase_rng.uniform_int(0, period_ns_ - 1));
}

void SensorSource::drain(SimTime until, SensorBatch& batch) {
  const double span = size_bits_.b - size_bits_.a;
  while (next_at_ < until) {
    const double bits = std::round(size_bits_.a + span * sizes_.next_unit());
    batch.bits += static_cast<std::uint64_t>(bits);
    batch.readings += 1;
    batch.created_sum_s += next_at_.seconds();
    if (next_at_ < batch.first_created) batch.first_created = next_at_;
    next_at_ = next_at_ + SimTime::from_ns(period_ns_);
    ++emitted_;
  }
}

}  // namespace gemn::traffic
