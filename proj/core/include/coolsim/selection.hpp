#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "coolsim/request.hpp"
#include "coolsim/rng.hpp"

namespace coolsim {

/// Tuning of the provider selection module.
struct PsmParams {
  std::size_t s = 5;           // sliding window size
  double c = 5.0;              // cluster threshold, ms
  double a = 0.5;              // attrition ratio of the worst cluster
  double x = 0.005;            // exploration coefficient
  double k_p = 0.3;            // proportional gain
  double k_d = -0.005;         // derivative gain, per ms
  std::size_t update_every = 40;  // responses between ratio updates
  /// Keep ratios uniform until every provider has at least one sample.
  bool hold_uniform_until_sampled = false;

  void validate() const;
};

/// Per-provider ring holding the 2s most recent latency samples.
class LatencyWindow {
 public:
  LatencyWindow(std::size_t n_providers, std::size_t s);

  std::size_t n_providers() const { return counts_.size(); }
  std::size_t s() const { return s_; }
  std::size_t capacity() const { return 2 * s_; }

  void push(ProviderId provider, double delta);
  /// Number of samples held, at most 2s.
  std::size_t count(ProviderId provider) const { return counts_.at(provider); }
  /// k-th newest sample, k = 0 is the newest.
  double sample(ProviderId provider, std::size_t k) const;

  /// Mean of slots 1..s (newest first), over whatever is present.
  std::optional<double> current_mean(ProviderId provider) const;
  /// Mean of slots s+1..2s, over whatever is present.
  std::optional<double> previous_mean(ProviderId provider) const;

 private:
  std::size_t s_;
  std::vector<double> ring_;
  std::vector<std::size_t> heads_;
  std::vector<std::size_t> counts_;
};

/// One update of the selection ratios from windowed latency averages.
///
/// Providers are split into a best cluster (average within c of the best
/// average) and the rest. Best-cluster ratios move by a PD step towards the
/// cluster's mean latency; the rest lose a fraction a of their ratio, which
/// the best cluster absorbs on renormalization. The result is finally mixed
/// with the uniform distribution by x.
///
/// Providers with fewer than two samples join the best cluster with zero
/// error and derivative and do not take part in the best/target averages.
std::vector<double> update_selection_ratios(std::span<const double> r_in,
                                            const LatencyWindow& windows,
                                            const PsmParams& params);

/// Providers in the best cluster under the same rules as the update.
std::vector<ProviderId> best_cluster(const LatencyWindow& windows, const PsmParams& params);

/// Per-consumer selection state.
class SelectionState {
 public:
  SelectionState(std::size_t n_providers, PsmParams params);

  const PsmParams& params() const { return params_; }
  std::span<const double> ratios() const { return ratios_; }
  const LatencyWindow& windows() const { return windows_; }
  std::size_t n_providers() const { return ratios_.size(); }
  std::size_t responses_since_update() const { return since_update_; }
  std::size_t updates() const { return updates_; }

  /// Logs delta = max(0, rtt - reported_queue_wait). Returns true when an
  /// update is due.
  bool record_sample(ProviderId provider, double rtt, double reported_queue_wait);

  /// Runs the ratio update (unless held uniform during warm-up).
  void update();

  void set_ratios(std::vector<double> ratios);

 private:
  PsmParams params_;
  std::vector<double> ratios_;
  LatencyWindow windows_;
  std::size_t since_update_ = 0;
  std::size_t updates_ = 0;
};

/// Categorical draw: one uniform against cumulative ratios in id order.
ProviderId select_provider(std::span<const double> ratios, RngStream& rng);

/// k distinct providers by sequential ratio-weighted draws without
/// replacement. k = N_P returns every provider.
std::vector<ProviderId> select_multi_weighted(std::span<const double> ratios, std::size_t k,
                                              RngStream& rng);

/// k distinct providers uniformly without replacement.
std::vector<ProviderId> select_multi_uniform(std::size_t n_providers, std::size_t k,
                                             RngStream& rng);

/// Shorter reported queue wins; ties are a fair coin.
ProviderId select_pot(std::pair<ProviderId, ProviderId> pair,
                      std::pair<std::size_t, std::size_t> reported_lengths, RngStream& rng);

/// The two providers with the smallest latency estimates, ties broken
/// uniformly at random.
std::pair<ProviderId, ProviderId> spot_candidates(std::span<const double> latency_estimates,
                                                  RngStream& rng);

/// Proximity power-of-two: two nearest by estimate, then shorter queue.
ProviderId select_spot(std::span<const double> latency_estimates,
                       const std::function<std::size_t(ProviderId)>& reported_length,
                       RngStream& rng);

}  // namespace coolsim
