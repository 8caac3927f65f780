#include "gemn/metrics/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gemn::metrics {

MetricSeries::MetricSeries(std::string name, std::string unit, std::string label, std::string key_column,
                           std::string value_column)
    : name_{std::move(name)},
      unit_{std::move(unit)},
      label_{std::move(label)},
      key_column_{std::move(key_column)},
      value_column_{std::move(value_column)} {}

void MetricSeries::add(double t, double value) {
  if (categorical_) throw std::logic_error("series '" + name_ + "' is categorical");
  if (!rows_.empty() && t < rows_.back().t) throw std::logic_error("series '" + name_ + "' rows must be time-ordered");
  rows_.push_back({{}, t, value});
}

void MetricSeries::add(std::string category, double value) {
  if (!rows_.empty() && !categorical_) throw std::logic_error("series '" + name_ + "' is timed");
  categorical_ = true;
  rows_.push_back({std::move(category), 0.0, value});
}

double nearest_rank(std::vector<WeightedSample>& samples, double p) {
  if (samples.empty()) return 0.0;
  if (!(p > 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must lie in (0, 100]");
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  std::uint64_t total = 0;
  for (const auto& s : samples) total += s.weight;
  const auto rank = static_cast<std::uint64_t>(std::ceil(p / 100.0 * static_cast<double>(total)));
  std::uint64_t seen = 0;
  for (const auto& s : samples) {
    seen += s.weight;
    if (seen >= std::max<std::uint64_t>(rank, 1)) return s.value;
  }
  return samples.back().value;
}

double nearest_rank(std::vector<double>& values, double p) {
  std::vector<WeightedSample> w;
  w.reserve(values.size());
  for (double v : values) w.push_back({v, 1});
  return nearest_rank(w, p);
}

std::string format_value(double v) {
  if (v == 0.0) return "0";  // folds -0 as well
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace gemn::metrics
