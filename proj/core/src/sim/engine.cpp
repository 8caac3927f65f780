#include "gemn/sim/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace gemn::sim {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kTimer: return "timer";
    case EventKind::kPacketArrival: return "packet-arrival";
    case EventKind::kSlotBoundary: return "slot-boundary";
    case EventKind::kWake: return "wake";
    case EventKind::kServiceDone: return "service-done";
    case EventKind::kReportDue: return "report-due";
    case EventKind::kHarvestTick: return "harvest-tick";
    case EventKind::kHello: return "hello";
    case EventKind::kTopologyControl: return "topology-control";
    case EventKind::kTrafficSource: return "traffic-source";
    case EventKind::kAttackPacket: return "attack-packet";
    case EventKind::kMccAggregate: return "mcc-aggregate";
  }
  return "unknown";
}

EventHandle Engine::schedule(SimTime at, EventKind kind, NodeId target, std::uint64_t payload,
                             std::uint64_t aux) {
  if (at < now_) {
    throw std::logic_error("event scheduled in the past: " + to_string(at) + " < " + to_string(now_));
  }
  SimEvent ev{at, next_sequence_++, kind, target, payload, aux};
  heap_.push_back(ev);
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  return EventHandle{ev.sequence};
}

EventHandle Engine::schedule(const SimEvent& event) {
  return schedule(event.fire_at, event.kind, event.target, event.payload, event.aux);
}

bool Engine::cancel(EventHandle handle) {
  if (handle.sequence == 0 || handle.sequence >= next_sequence_) return false;
  if (cancelled_.contains(handle.sequence)) return false;
  const bool queued = std::any_of(heap_.begin(), heap_.end(),
                                  [&](const SimEvent& e) { return e.sequence == handle.sequence; });
  if (!queued) return false;
  cancelled_.insert(handle.sequence);
  ++cancelled_count_;
  return true;
}

RunSummary Engine::run_until(SimTime horizon, const Handler& handler) {
  RunSummary summary;
  stop_requested_ = false;
  while (!heap_.empty() && heap_.front().fire_at <= horizon) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    const SimEvent ev = heap_.back();
    heap_.pop_back();
    if (auto it = cancelled_.find(ev.sequence); it != cancelled_.end()) {
      cancelled_.erase(it);
      continue;
    }
    now_ = ev.fire_at;
    ++fired_;
    ++summary.events_processed;
    if (observer_) observer_(ev);
    handler(ev);
    if (stop_requested_) break;
  }
  if (!stop_requested_ && horizon > now_) now_ = horizon;
  summary.final_clock = now_;
  return summary;
}

EngineCounters Engine::counters() const {
  return EngineCounters{next_sequence_ - 1, fired_, cancelled_count_, pending()};
}

}  // namespace gemn::sim
