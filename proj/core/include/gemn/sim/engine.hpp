#pragma once

#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

#include "gemn/sim/time.hpp"

namespace gemn::sim {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = UINT32_MAX;

enum class EventKind : std::uint8_t {
  kTimer,
  kPacketArrival,
  kSlotBoundary,
  kWake,
  kServiceDone,
  kReportDue,
  kHarvestTick,
  kHello,
  kTopologyControl,
  kTrafficSource,
  kAttackPacket,
  kMccAggregate,
};

const char* to_string(EventKind kind);

struct SimEvent {
  SimTime fire_at;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::kTimer;
  NodeId target = kNoNode;
  std::uint64_t payload = 0;
  std::uint64_t aux = 0;
};

struct EventHandle {
  std::uint64_t sequence = 0;
};

struct RunSummary {
  std::uint64_t events_processed = 0;
  SimTime final_clock;
};

struct EngineCounters {
  std::uint64_t scheduled = 0;
  std::uint64_t fired = 0;
  std::uint64_t cancelled = 0;
  std::uint64_t pending = 0;
};

// Single-threaded discrete-event scheduler ordered by (fire_at, sequence).
class Engine {
 public:
  using Handler = std::function<void(const SimEvent&)>;
  using Observer = std::function<void(const SimEvent&)>;

  // Throws std::logic_error when `at` precedes the current clock.
  EventHandle schedule(SimTime at, EventKind kind, NodeId target = kNoNode, std::uint64_t payload = 0,
                       std::uint64_t aux = 0);
  EventHandle schedule(const SimEvent& event);
  // Returns false if the event already fired or was cancelled.
  bool cancel(EventHandle handle);

  // Processes every event with fire_at <= horizon, then advances the clock to
  // the horizon. Events left in the queue stay pending.
  RunSummary run_until(SimTime horizon, const Handler& handler);
  // Stops the current run_until after the event being handled.
  void request_stop() { stop_requested_ = true; }

  [[nodiscard]] SimTime now() const { return now_; }
  [[nodiscard]] EngineCounters counters() const;
  [[nodiscard]] std::size_t pending() const { return heap_.size() - cancelled_.size(); }

  // Called for every fired event before the handler; used for event logs.
  void set_observer(Observer observer) { observer_ = std::move(observer); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  std::vector<SimEvent> heap_;
  std::unordered_set<std::uint64_t> cancelled_;
  SimTime now_;
  std::uint64_t next_sequence_ = 1;
  std::uint64_t fired_ = 0;
  std::uint64_t cancelled_count_ = 0;
  bool stop_requested_ = false;
  Observer observer_;
};

}  // namespace gemn::sim
