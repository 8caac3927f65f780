#pragma once

#include <string>
#include <vector>

#include "gemn/metrics/series.hpp"

namespace gemn::metrics {

enum class ChartKind { kLine, kBar };

struct PlotSpec {
  ChartKind kind = ChartKind::kLine;
  std::string title;
  std::string x_label;  // defaults to the first series' key column
  std::string y_label;  // defaults to the first series' unit
  int width = 720;
  int height = 420;
  bool markers = true;
};

// Self-contained SVG (inline styles, no external references). Line charts
// draw one polyline per timed series; bar charts draw grouped bars for
// categorical series. An empty input yields a "no data" placeholder.
std::string render_svg(const std::vector<const MetricSeries*>& series, const PlotSpec& spec);

std::string xml_escape(const std::string& text);

}  // namespace gemn::metrics
