#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>

#include "coolsim/request.hpp"
#include "coolsim/rng.hpp"

namespace coolsim {

/// What an untrusted host reports as queue wait when the enclave has no
/// trustworthy clock.
enum class NoTtFabrication {
  kNone,      // report the measured value
  kAddDelay,  // add delta_att so delayed responses look like queueing
};

struct ProviderBehavior {
  bool honest = true;
  bool delay_attack = false;
  bool content_attack = false;
  bool queue_attack = false;
  double delta_att_ms = 50.0;
  bool trusted_time = false;
  /// Standard deviation of the trusted clock's error, ms.
  double clock_error_sigma_ms = 0.0;
  NoTtFabrication fabrication = NoTtFabrication::kAddDelay;

  /// Throws std::invalid_argument when the combination is inconsistent.
  void validate() const;
  bool any_attack() const { return delay_attack || content_attack || queue_attack; }
};

/// Outcome of starting a service.
struct ServiceStart {
  RequestId request = 0;
  SimTime t_tee_enter = 0.0;
  SimTime t_serv = 0.0;
  SimTime t_end = 0.0;
};

/// TEE-hosted search server: one non-preemptive server with service time D,
/// FIFO queue inside the enclave, and an optional host-side queue used by the
/// queue attack. The in-service request stays at the head of the enclave
/// queue until it completes.
class Provider {
 public:
  Provider(ProviderId id, ProviderBehavior behavior, double service_time_ms, RngStream clock_rng);

  ProviderId id() const { return id_; }
  const ProviderBehavior& behavior() const { return behavior_; }
  double service_time() const { return service_time_; }

  /// Accepts an arriving request. Returns true when the caller should start
  /// a service at `now` (server idle and work waiting).
  bool enqueue(RequestId request, SimTime now);

  /// Starts serving the request at the head of the enclave queue.
  std::optional<ServiceStart> start_service(SimTime now);

  /// Builds the response for the request that just finished, with the
  /// reported wait chosen by the time-reporting rules. Egress is separate.
  SearchResponse complete_service(RequestId request, bool requester_honest, SimTime now);

  /// Host-side handling of an outgoing response.
  SearchResponse apply_egress_policy(SearchResponse rsp, bool requester_honest, SimTime now) const;

  /// Removes the finished request and refills the enclave queue. Returns true
  /// when another service should start at `now`.
  bool finish_service(SimTime now);

  /// Queue length as seen by a load-balancing probe.
  std::size_t report_queue_length() const;

  std::size_t tee_queue_length() const { return tee_queue_.size(); }
  std::size_t external_queue_length() const { return external_queue_.size(); }
  std::size_t backlog() const { return tee_queue_.size() + external_queue_.size(); }
  bool busy() const { return in_service_.has_value(); }
  SimTime busy_until() const { return busy_until_; }
  std::uint64_t served_count() const { return served_; }

  void on_asset_indexed(AssetId asset, SimTime t_index);
  std::size_t indexed_count() const { return indexed_; }

 private:
  struct Queued {
    RequestId request;
    SimTime t_tee_enter;
  };

  void refill_tee(SimTime now);

  ProviderId id_;
  ProviderBehavior behavior_;
  double service_time_;
  RngStream clock_rng_;
  std::deque<Queued> tee_queue_;
  std::deque<RequestId> external_queue_;
  std::optional<ServiceStart> in_service_;
  SimTime busy_until_ = 0.0;
  std::uint64_t served_ = 0;
  std::size_t indexed_ = 0;
};

}  // namespace coolsim
