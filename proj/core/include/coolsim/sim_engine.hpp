#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coolsim {

/// Simulated time in milliseconds since simulation start.
using SimTime = double;

enum class EventKind : std::uint8_t {
  kRequestGenerated,
  kRequestArrives,
  kServiceStart,
  kServiceEnd,
  kResponseArrives,
  kAssetArrives,
  kAssetIndexed,
  kPsmUpdate,
};

std::string_view to_string(EventKind kind);

struct Event {
  SimTime fire_time = 0.0;
  std::uint64_t sequence = 0;  // assigned by the engine on schedule()
  EventKind kind = EventKind::kRequestGenerated;
  std::uint64_t payload = 0;
};

/// Handle returned by schedule(); equal to the event's sequence number.
using EventHandle = std::uint64_t;

/// Thrown when an event is scheduled in the past.
class CausalityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct RunStats {
  std::uint64_t dispatched = 0;
  SimTime final_clock = 0.0;
};

/// Single-threaded discrete-event scheduler. Events are dispatched in
/// (fire_time, sequence) order; sequence numbers grow with insertion order so
/// equal-time events run first-scheduled-first.
class Engine {
 public:
  using Handler = std::function<void(const Event&)>;

  Engine() = default;
  explicit Engine(Handler handler) : handler_(std::move(handler)) {}

  void set_handler(Handler handler) { handler_ = std::move(handler); }

  /// Records every dispatched event when enabled.
  void enable_trace(bool on) { tracing_ = on; }
  const std::vector<Event>& trace() const { return trace_; }

  SimTime now() const { return clock_; }
  std::size_t pending() const { return queue_.size(); }

  EventHandle schedule(SimTime fire_time, EventKind kind, std::uint64_t payload);
  EventHandle schedule(const Event& event) {
    return schedule(event.fire_time, event.kind, event.payload);
  }

  /// Dispatches every event with fire_time <= end. The clock stops at the last
  /// dispatched event, or at end if the queue still holds later events.
  RunStats run_until(SimTime end);

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence > b.sequence;
    }
  };

  Handler handler_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_sequence_ = 0;
  SimTime clock_ = 0.0;
  bool tracing_ = false;
  std::vector<Event> trace_;
  std::uint64_t dispatched_ = 0;
};

}  // namespace coolsim
