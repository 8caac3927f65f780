#include "gemn/metrics/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace gemn::metrics {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Round axis bounds outward to a "nice" step.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.2;
};

Axis nice_axis(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  Axis a;
  a.lo = std::floor(lo / step) * step;
  a.hi = std::ceil(hi / step) * step;
  a.step = step;
  return a;
}

void header(std::ostringstream& os, const PlotSpec& spec) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height << "\" fill=\"#ffffff\"/>\n";
  if (!spec.title.empty()) {
    os << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << xml_escape(spec.title) << "</text>\n";
  }
}

}  // namespace

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_svg(const std::vector<const MetricSeries*>& series, const PlotSpec& spec_in) {
  PlotSpec spec = spec_in;
  std::ostringstream os;
  header(os, spec);

  bool any = false;
  for (const auto* s : series) any = any || (s && !s->empty());
  if (!any) {
    os << "<text x=\"" << spec.width / 2 << "\" y=\"" << spec.height / 2
       << "\" text-anchor=\"middle\" fill=\"#777777\">no data</text>\n</svg>\n";
    return os.str();
  }
  const MetricSeries* first = nullptr;
  for (const auto* s : series) {
    if (s && !s->empty()) {
      first = s;
      break;
    }
  }
  if (spec.x_label.empty()) spec.x_label = first->key_column();
  if (spec.y_label.empty()) spec.y_label = first->unit();

  const double left = 70.0;
  const double right = spec.width - 20.0;
  const double top = 40.0;
  const double bottom = spec.height - 60.0;

  double ymin = 0.0;
  double ymax = -std::numeric_limits<double>::infinity();
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  std::vector<std::string> categories;
  for (const auto* s : series) {
    if (!s) continue;
    for (const auto& r : s->rows()) {
      ymin = std::min(ymin, r.value);
      ymax = std::max(ymax, r.value);
      xmin = std::min(xmin, r.t);
      xmax = std::max(xmax, r.t);
      if (s->categorical() && std::find(categories.begin(), categories.end(), r.key) == categories.end()) {
        categories.push_back(r.key);
      }
    }
  }
  const Axis ya = nice_axis(ymin, ymax);
  auto ypos = [&](double v) { return bottom - (v - ya.lo) / (ya.hi - ya.lo) * (bottom - top); };

  // Frame, y ticks and labels.
  os << "<g stroke=\"#333333\" stroke-width=\"1\">\n"
     << "<line x1=\"" << num(left) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(right) << "\" y2=\"" << num(bottom)
     << "\"/>\n"
     << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\"" << num(bottom)
     << "\"/>\n</g>\n";
  const int yticks = static_cast<int>(std::llround((ya.hi - ya.lo) / ya.step));
  for (int i = 0; i <= yticks; ++i) {
    const double v = ya.lo + i * ya.step;
    os << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(ypos(v)) << "\" x2=\"" << num(right) << "\" y2=\""
       << num(ypos(v)) << "\" stroke=\"#dddddd\"/>\n"
       << "<text x=\"" << num(left - 6) << "\" y=\"" << num(ypos(v) + 4) << "\" text-anchor=\"end\">"
       << xml_escape(format_value(v)) << "</text>\n";
  }
  os << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(spec.height - 12.0)
     << "\" text-anchor=\"middle\">" << xml_escape(spec.x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << num((top + bottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << num((top + bottom) / 2) << ")\">" << xml_escape(spec.y_label) << "</text>\n";

  std::size_t color = 0;
  if (spec.kind == ChartKind::kBar || first->categorical()) {
    const double n = std::max<double>(1.0, static_cast<double>(categories.size()));
    const double group = (right - left) / n;
    const double nseries = static_cast<double>(series.size());
    const double bar = group * 0.8 / nseries;
    for (std::size_t c = 0; c < categories.size(); ++c) {
      const double gx = left + group * static_cast<double>(c);
      os << "<text x=\"" << num(gx + group / 2) << "\" y=\"" << num(bottom + 16) << "\" text-anchor=\"middle\">"
         << xml_escape(categories[c]) << "</text>\n";
    }
    for (std::size_t si = 0; si < series.size(); ++si) {
      const auto* s = series[si];
      const char* fill = kPalette[color++ % std::size(kPalette)];
      if (!s) continue;
      for (const auto& r : s->rows()) {
        const auto c = static_cast<double>(std::find(categories.begin(), categories.end(), r.key) - categories.begin());
        const double x = left + group * c + group * 0.1 + bar * static_cast<double>(si);
        const double y0 = ypos(std::max(0.0, ya.lo));
        const double y1 = ypos(r.value);
        os << "<rect x=\"" << num(x) << "\" y=\"" << num(std::min(y0, y1)) << "\" width=\"" << num(bar)
           << "\" height=\"" << num(std::abs(y0 - y1)) << "\" fill=\"" << fill << "\"/>\n";
      }
    }
  } else {
    const Axis xa = nice_axis(xmin, xmax);
    auto xpos = [&](double v) { return left + (v - xa.lo) / (xa.hi - xa.lo) * (right - left); };
    const int xticks = static_cast<int>(std::llround((xa.hi - xa.lo) / xa.step));
    for (int i = 0; i <= xticks; ++i) {
      const double v = xa.lo + i * xa.step;
      os << "<text x=\"" << num(xpos(v)) << "\" y=\"" << num(bottom + 16) << "\" text-anchor=\"middle\">"
         << xml_escape(format_value(v)) << "</text>\n";
    }
    for (const auto* s : series) {
      const char* stroke = kPalette[color++ % std::size(kPalette)];
      if (!s || s->empty()) continue;
      os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
      bool sep = false;
      for (const auto& r : s->rows()) {
        os << (sep ? " " : "") << num(xpos(r.t)) << ',' << num(ypos(r.value));
        sep = true;
      }
      os << "\"/>\n";
      if (spec.markers && s->rows().size() <= 200) {
        for (const auto& r : s->rows()) {
          os << "<circle cx=\"" << num(xpos(r.t)) << "\" cy=\"" << num(ypos(r.value)) << "\" r=\"3\" fill=\"" << stroke
             << "\"/>\n";
        }
      }
    }
  }

  // Legend.
  color = 0;
  double ly = top + 4;
  for (const auto* s : series) {
    const char* c = kPalette[color++ % std::size(kPalette)];
    if (!s) continue;
    os << "<rect x=\"" << num(right - 150) << "\" y=\"" << num(ly) << "\" width=\"10\" height=\"10\" fill=\"" << c
       << "\"/>\n<text x=\"" << num(right - 135) << "\" y=\"" << num(ly + 9) << "\">" << xml_escape(s->name())
       << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace gemn::metrics
