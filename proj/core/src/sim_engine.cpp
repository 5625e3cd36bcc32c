#include "coolsim/sim_engine.hpp"

#include <cmath>

namespace coolsim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kRequestGenerated: return "request-generated";
    case EventKind::kRequestArrives: return "request-arrives";
    case EventKind::kServiceStart: return "service-start";
    case EventKind::kServiceEnd: return "service-end";
    case EventKind::kResponseArrives: return "response-arrives";
    case EventKind::kAssetArrives: return "asset-arrives";
    case EventKind::kAssetIndexed: return "asset-indexed";
    case EventKind::kPsmUpdate: return "psm-update";
  }
  return "unknown";
}

EventHandle Engine::schedule(SimTime fire_time, EventKind kind, std::uint64_t payload) {
  if (!std::isfinite(fire_time)) {
    throw CausalityError("event time is not finite");
  }
  if (fire_time < clock_) {
    throw CausalityError("event scheduled at t=" + std::to_string(fire_time) +
                         " before current clock t=" + std::to_string(clock_));
  }
  const std::uint64_t seq = next_sequence_++;
  queue_.push(Event{fire_time, seq, kind, payload});
  return seq;
}

RunStats Engine::run_until(SimTime end) {
  const std::uint64_t before = dispatched_;
  while (!queue_.empty() && queue_.top().fire_time <= end) {
    const Event ev = queue_.top();
    queue_.pop();
    clock_ = ev.fire_time;
    ++dispatched_;
    if (tracing_) trace_.push_back(ev);
    if (handler_) handler_(ev);
  }
  if (!queue_.empty() && clock_ < end) clock_ = end;
  return RunStats{dispatched_ - before, clock_};
}

}  // namespace coolsim
