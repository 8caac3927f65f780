#include "gemn/ids/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gemn::ids {

std::pair<NodeId, double> TrafficFeatures::top_source() const {
  std::pair<NodeId, double> best{sim::kNoNode, 0.0};
  if (total_packets == 0) return best;
  std::uint64_t most = 0;
  for (const auto& [src, n] : per_source_packets) {
    if (n > most) {
      most = n;
      best.first = src;
    }
  }
  best.second = static_cast<double>(most) / static_cast<double>(total_packets);
  return best;
}

namespace {

// Fraction of a record's span that falls inside [lo, hi).
double overlap_fraction(const IngressRecord& r, SimTime lo, SimTime hi) {
  if (r.span.ns() == 0) return (r.at >= lo && r.at < hi) ? 1.0 : 0.0;
  const SimTime a = std::max(r.at, lo);
  const SimTime b = std::min(r.at + r.span, hi);
  if (b <= a) return 0.0;
  return static_cast<double>((b - a).ns()) / static_cast<double>(r.span.ns());
}

}  // namespace

TrafficFeatures extract_features(std::span<const IngressRecord> records, SimTime start, SimTime end,
                                 SimTime gap_threshold) {
  if (end <= start) throw std::invalid_argument("feature window must have positive length");
  TrafficFeatures f;
  f.start = start;
  f.end = end;

  const std::int64_t bin_ns = SimTime::kTicksPerSecond;
  const std::int64_t len_ns = (end - start).ns();
  const auto bins = static_cast<std::size_t>((len_ns + bin_ns - 1) / bin_ns);
  std::vector<double> bin_bits(bins, 0.0);

  struct Piece {
    SimTime at;
    SimTime span;
    double bits;
    double packets;
  };
  std::vector<Piece> pieces;
  pieces.reserve(records.size());
  double total_bits = 0.0;
  double total_packets = 0.0;

  for (const auto& r : records) {
    const double frac = overlap_fraction(r, start, end);
    if (frac <= 0.0) continue;
    const double bits = static_cast<double>(r.bits) * frac;
    const double pk = static_cast<double>(r.packets) * frac;
    total_bits += bits;
    total_packets += pk;
    f.per_source_packets[r.src] += static_cast<std::uint64_t>(std::llround(pk));

    const SimTime a = std::max(r.at, start);
    const SimTime b = r.span.ns() == 0 ? a : std::min(r.at + r.span, end);
    pieces.push_back({a, b - a, bits, pk});
    if (r.span.ns() == 0) {
      bin_bits[static_cast<std::size_t>((a - start).ns() / bin_ns)] += bits;
      continue;
    }
    // Spread evenly across the bins the clipped span touches.
    const double per_ns = bits / static_cast<double>((b - a).ns());
    for (std::int64_t t = (a - start).ns(); t < (b - start).ns();) {
      const std::int64_t bin = t / bin_ns;
      const std::int64_t stop = std::min((bin + 1) * bin_ns, (b - start).ns());
      bin_bits[static_cast<std::size_t>(bin)] += per_ns * static_cast<double>(stop - t);
      t = stop;
    }
  }

  f.total_bits = static_cast<std::uint64_t>(std::llround(total_bits));
  f.total_packets = static_cast<std::uint64_t>(std::llround(total_packets));
  f.avg_rate_bps = total_bits / (static_cast<double>(len_ns) / 1e9);
  for (std::size_t i = 0; i < bins; ++i) {
    const std::int64_t lo = static_cast<std::int64_t>(i) * bin_ns;
    const std::int64_t width = std::min(bin_ns, len_ns - lo);
    f.bin_rates_bps.push_back(bin_bits[i] / (static_cast<double>(width) / 1e9));
    f.peak_rate_bps = std::max(f.peak_rate_bps, f.bin_rates_bps.back());
  }
  // A partial trailing bin can under-report relative to the mean.
  f.peak_rate_bps = std::max(f.peak_rate_bps, f.avg_rate_bps);

  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.at < y.at; });
  double run = 0.0;
  SimTime run_end;
  bool open = false;
  for (const auto& p : pieces) {
    const bool contiguous = p.packets <= 1.0 || p.span.ns() == 0 ||
                            static_cast<double>(p.span.ns()) / p.packets < static_cast<double>(gap_threshold.ns());
    if (!contiguous) {
      // Packets inside this piece are individually separated.
      f.burst_size_bits = std::max(f.burst_size_bits, p.bits / p.packets);
      open = false;
      continue;
    }
    if (open && p.at - run_end < gap_threshold) {
      run += p.bits;
      run_end = std::max(run_end, p.at + p.span);
    } else {
      run = p.bits;
      run_end = p.at + p.span;
    }
    open = true;
    f.burst_size_bits = std::max(f.burst_size_bits, run);
  }
  f.burst_size_bits = std::min(f.burst_size_bits, total_bits);
  return f;
}

}  // namespace gemn::ids
