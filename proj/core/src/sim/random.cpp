#include "gemn/sim/random.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gemn::sim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <class>
inline constexpr bool kAlwaysFalse = false;

}  // namespace

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RandomStream::RandomStream(std::uint64_t seed, std::string_view stream_id)
    : key_{mix64(mix64(seed + kGolden) ^ hash_label(stream_id))} {}

RandomStream RandomStream::split(std::string_view child) const {
  return RandomStream{mix64(key_ ^ mix64(hash_label(child) + kGolden))};
}

RandomStream RandomStream::split(std::uint64_t index) const {
  return RandomStream{mix64(key_ + mix64((index + 1) * kGolden))};
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t c = ++counter_;
  return mix64(mix64(c * kGolden ^ key_) + key_);
}

double RandomStream::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RandomStream::uniform(double a, double b) {
  if (a > b) throw std::invalid_argument("uniform: a > b");
  return a + (b - a) * next_unit();
}

std::int64_t RandomStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());
  // Lemire's nearly-divisionless bounded draw.
  __extension__ typedef unsigned __int128 u128;
  u128 m = static_cast<u128>(next_u64()) * span;
  auto low = static_cast<std::uint64_t>(m);
  if (low < span) {
    const std::uint64_t threshold = (0 - span) % span;
    while (low < threshold) {
      m = static_cast<u128>(next_u64()) * span;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return lo + static_cast<std::int64_t>(m >> 64);
}

double RandomStream::exponential(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("exponential: mean must be positive");
  return -mean * std::log1p(-next_unit());
}

bool RandomStream::bernoulli(double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return next_unit() < p;
}

void validate(const Distribution& dist) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformDist>) {
          if (!(d.a <= d.b)) throw std::invalid_argument("uniform distribution requires a <= b");
        } else if constexpr (std::is_same_v<T, ExponentialDist>) {
          if (!(d.mean > 0.0)) throw std::invalid_argument("exponential distribution requires mean > 0");
        } else if constexpr (std::is_same_v<T, ConstantDist>) {
          if (!std::isfinite(d.value)) throw std::invalid_argument("constant distribution must be finite");
        } else if constexpr (std::is_same_v<T, DiscreteDist>) {
          if (d.values.empty() || d.values.size() != d.weights.size()) {
            throw std::invalid_argument("discrete distribution needs one weight per value");
          }
          double total = 0.0;
          for (double w : d.weights) {
            if (w < 0.0) throw std::invalid_argument("discrete weights must be nonnegative");
            total += w;
          }
          if (!(total > 0.0)) throw std::invalid_argument("discrete weights must not all be zero");
        } else {
          static_assert(kAlwaysFalse<T>);
        }
      },
      dist);
}

double next_random(RandomStream& stream, const Distribution& dist) {
  validate(dist);
  return std::visit(
      [&stream](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformDist>) {
          return stream.uniform(d.a, d.b);
        } else if constexpr (std::is_same_v<T, ExponentialDist>) {
          return stream.exponential(d.mean);
        } else if constexpr (std::is_same_v<T, ConstantDist>) {
          return d.value;
        } else {
          const double total = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
          double u = stream.next_unit() * total;
          for (std::size_t i = 0; i < d.values.size(); ++i) {
            if (u < d.weights[i]) return d.values[i];
            u -= d.weights[i];
          }
          return d.values.back();
        }
      },
      dist);
}

double mean_of(const Distribution& dist) {
  validate(dist);
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformDist>) {
          return 0.5 * (d.a + d.b);
        } else if constexpr (std::is_same_v<T, ExponentialDist>) {
          return d.mean;
        } else if constexpr (std::is_same_v<T, ConstantDist>) {
          return d.value;
        } else {
          double total = 0.0, weighted = 0.0;
          for (std::size_t i = 0; i < d.values.size(); ++i) {
            total += d.weights[i];
            weighted += d.weights[i] * d.values[i];
          }
          return weighted / total;
        }
      },
      dist);
}

}  // namespace gemn::sim
