#include "gemn/metrics/summary.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace gemn::metrics {

DelayStats summarize_delays(std::vector<WeightedSample> samples) {
  DelayStats d;
  if (samples.empty()) return d;
  double weighted = 0.0;
  for (const auto& s : samples) {
    d.samples += s.weight;
    weighted += s.value * static_cast<double>(s.weight);
    d.max_s = std::max(d.max_s, s.value);
  }
  d.mean_s = weighted / static_cast<double>(d.samples);
  d.p50_s = nearest_rank(samples, 50.0);
  d.p95_s = nearest_rank(samples, 95.0);
  d.p99_s = nearest_rank(samples, 99.0);
  return d;
}

bool RunSummary::packets_conserved() const {
  return std::all_of(packets_by_app.begin(), packets_by_app.end(), [](const auto& kv) { return kv.second.conserved(); });
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream os;
  os << "run " << s.label << " seed " << s.seed << " horizon " << format_value(s.horizon_s) << " s";
  if (s.measured_from_s > 0.0) os << " (measured from " << format_value(s.measured_from_s) << " s)";
  os << "\nevents " << s.events << "\n\n";

  os << "packets (generated / delivered / dropped / in flight)\n";
  for (const auto& [app, c] : s.packets_by_app) {
    os << "  " << std::left << std::setw(12) << app << c.generated << " / " << c.delivered << " / " << c.dropped << " / "
       << c.in_flight << (c.conserved() ? "" : "  MISMATCH") << '\n';
  }
  os << "packet conservation " << (s.packets_conserved() ? "holds" : "VIOLATED") << '\n';

  os << "\nend-to-end delay (s): mean p50 p95 p99 max\n";
  for (const auto& [app, d] : s.delay_by_app) {
    os << "  " << std::left << std::setw(12) << app << format_value(d.mean_s) << ' ' << format_value(d.p50_s) << ' '
       << format_value(d.p95_s) << ' ' << format_value(d.p99_s) << ' ' << format_value(d.max_s) << '\n';
  }
  os << "signaling access delay (s): mean " << format_value(s.signaling_access.mean_s) << " p99 "
     << format_value(s.signaling_access.p99_s) << '\n';

  os << "\ndrops by cause\n";
  if (s.drops_by_cause.empty()) os << "  none\n";
  for (const auto& [cause, n] : s.drops_by_cause) os << "  " << cause << ' ' << n << '\n';

  os << "\nalerts by tag";
  if (!s.anomaly_trained) os << " (anomaly baseline untrained, detector inactive)";
  os << '\n';
  if (s.alerts_by_tag.empty()) os << "  none\n";
  for (const auto& [tag, n] : s.alerts_by_tag) os << "  " << tag << ' ' << n << '\n';
  for (const auto& [det, n] : s.alerts_by_detector) os << "  detector " << det << ' ' << n << '\n';
  if (!s.network_blocks.empty()) {
    os << "network blocks:";
    for (auto id : s.network_blocks) os << ' ' << id;
    os << "\ndelivered packets through blocked nodes after block " << s.delivered_through_blocked << '\n';
  }

  os << "\nenergy identity max relative residual " << format_value(s.max_energy_residual) << "\n\n";
  os << "node kind tx_bits rx_bits asr_mbps final_soc depleted_at_s\n";
  for (const auto& n : s.nodes) {
    os << n.id << ' ' << n.kind << ' ' << format_value(n.tx_bits) << ' ' << format_value(n.rx_bits) << ' '
       << format_value(n.asr_mbps) << ' ' << format_value(n.final_fraction) << ' '
       << (n.depleted_at_s ? format_value(*n.depleted_at_s) : std::string("survived")) << '\n';
  }
  return os.str();
}

}  // namespace gemn::metrics
