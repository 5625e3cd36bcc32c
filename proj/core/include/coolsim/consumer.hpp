#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "coolsim/market.hpp"
#include "coolsim/metrics.hpp"
#include "coolsim/request.hpp"
#include "coolsim/rng.hpp"
#include "coolsim/selection.hpp"

namespace coolsim {

enum class Policy {
  kCool,
  kCoolTt,
  kDesearchRandom,
  kDesearchBestRandom,
  kMultiproviderK,
  kCoolPot,
  kSpot,
};

std::string_view to_string(Policy p);
Policy policy_from_string(std::string_view name);

struct ConsumerBehavior {
  bool honest = true;
  bool cuckoo = false;
  Policy policy = Policy::kCool;
  std::size_t k = 1;

  void validate() const;
};

/// Read-only view of the provider side used when choosing targets.
class ProviderView {
 public:
  virtual ~ProviderView() = default;
  virtual std::size_t n_providers() const = 0;
  virtual std::size_t report_queue_length(ProviderId p) const = 0;
  virtual const std::vector<ProviderId>& honest_providers() const = 0;
  virtual const std::vector<ProviderId>& malicious_providers() const = 0;
};

struct ConsumerOptions {
  /// Subtract provider-reported queue waits from measured RTTs.
  bool use_reported_wait = false;
  /// A cuckoo request whose honest target already reports this many queued
  /// requests goes to a colluding provider instead (0 disables the cap).
  std::size_t cuckoo_queue_cap = 0;
};

/// Request source for one consumer: arrival process, selection policy and
/// response bookkeeping.
class Consumer {
 public:
  Consumer(ConsumerId id, ConsumerBehavior behavior, std::size_t n_providers,
           const PsmParams& psm, ArrivalProcess arrivals, ConsumerOptions options,
           RngStream arrival_rng, RngStream select_rng);

  ConsumerId id() const { return id_; }
  const ConsumerBehavior& behavior() const { return behavior_; }
  const SelectionState& selection() const { return selection_; }
  SelectionState& selection() { return selection_; }
  const ArrivalProcess& arrivals() const { return arrivals_; }

  /// One-shot latency estimates used by sPoT (set once at wiring time).
  void set_latency_estimates(std::vector<double> estimates) { estimates_ = std::move(estimates); }

  /// Providers that receive the next request. A cuckoo consumer targets an
  /// honest provider uniformly; other malicious consumers run COoL.
  /// Sets `cuckoo_flag` when the request is part of a cuckoo attack.
  std::vector<ProviderId> choose_targets(const ProviderView& view, bool& cuckoo_flag);

  /// Time of the next request generation.
  SimTime next_generation(SimTime now) { return next_arrival(arrivals_, now, arrival_rng_); }

  /// Logs the latency sample and the discoveries a response carries.
  /// Returns true when a ratio update is due.
  bool on_response(ProviderId provider, double rtt, double reported_wait, SimTime asset_horizon,
                   SimTime now, DiscoveryLedger& ledger);

  /// Whether this consumer's policy uses selection ratios.
  bool uses_ratios() const;
  void update_ratios() { selection_.update(); }

 private:
  ConsumerId id_;
  ConsumerBehavior behavior_;
  SelectionState selection_;
  ArrivalProcess arrivals_;
  ConsumerOptions options_;
  RngStream arrival_rng_;
  RngStream select_rng_;
  std::vector<double> estimates_;
};

/// Per-consumer request rate (per second) that yields single-copy system load
/// rho: rho * N_P / (D * N_C), with D in seconds.
double per_consumer_rate(double rho, std::size_t n_providers, double service_time_ms,
                         std::size_t n_consumers);

}  // namespace coolsim
