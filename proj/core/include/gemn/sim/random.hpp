#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace gemn::sim {

// Counter-based generator: the i-th draw of a stream is a pure function of
// (key, i). Streams are keyed by (seed, purpose label) and split by child
// labels, so adding a consumer never shifts another consumer's sequence.
// Distributions are implemented here rather than through <random> so that
// sequences are identical across standard libraries.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view stream_id);

  [[nodiscard]] RandomStream split(std::string_view child) const;
  [[nodiscard]] RandomStream split(std::uint64_t index) const;

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double next_unit();
  double uniform(double a, double b);
  // Uniform integer on the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double exponential(double mean);
  bool bernoulli(double p);

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t draws() const { return counter_; }

 private:
  explicit RandomStream(std::uint64_t key) : key_{key} {}
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t hash_label(std::string_view label);

struct UniformDist {
  double a;
  double b;
};
struct ExponentialDist {
  double mean;
};
struct ConstantDist {
  double value;
};
struct DiscreteDist {
  std::vector<double> values;
  std::vector<double> weights;
};
using Distribution = std::variant<UniformDist, ExponentialDist, ConstantDist, DiscreteDist>;

// Throws std::invalid_argument for a > b, mean <= 0, or malformed discrete
// choices.
void validate(const Distribution& dist);
double next_random(RandomStream& stream, const Distribution& dist);
double mean_of(const Distribution& dist);

}  // namespace gemn::sim
