#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gemn::metrics {

// A named (key, value) series. Keys are either times (kept nondecreasing) or
// category labels; a series holds one kind only.
class MetricSeries {
 public:
  struct Row {
    std::string key;  // category label, empty for timed rows
    double t = 0.0;
    double value = 0.0;
  };

  MetricSeries(std::string name, std::string unit, std::string label, std::string key_column = "time_s",
               std::string value_column = "value");

  void add(double t, double value);
  void add(std::string category, double value);

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const std::string& unit() const { return unit_; }
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] const std::string& key_column() const { return key_column_; }
  [[nodiscard]] const std::string& value_column() const { return value_column_; }
  [[nodiscard]] const std::vector<Row>& rows() const { return rows_; }
  [[nodiscard]] bool categorical() const { return categorical_; }
  [[nodiscard]] bool empty() const { return rows_.empty(); }

 private:
  std::string name_;
  std::string unit_;
  std::string label_;
  std::string key_column_;
  std::string value_column_;
  std::vector<Row> rows_;
  bool categorical_ = false;
};

// Multi-column table of preformatted cells.
struct Table {
  std::string name;
  std::string label;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Value with an integer weight; a bundle of n readings contributes weight n.
struct WeightedSample {
  double value = 0.0;
  std::uint64_t weight = 1;
};

// Nearest-rank percentile, p in (0, 100]. Sorts in place. Empty input -> 0.
double nearest_rank(std::vector<WeightedSample>& samples, double p);
double nearest_rank(std::vector<double>& values, double p);

// "%.6g"-style rendering used by every artifact.
std::string format_value(double v);

}  // namespace gemn::metrics
