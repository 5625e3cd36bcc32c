#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coolsim/request.hpp"

namespace coolsim {

/// First-discovery bookkeeping for never-before-seen assets.
///
/// Assets are registered in index order (t_index non-decreasing). A consumer
/// that receives a response with horizon h has seen every asset with
/// t_index <= h, so each consumer's seen-set is a prefix of the asset list and
/// is kept as a watermark.
class DiscoveryLedger {
 public:
  struct FirstDiscovery {
    bool discovered = false;
    ConsumerId consumer = 0;
    SimTime t_first = 0.0;
  };

  /// consumer_malicious[i] tells whether consumer i is malicious.
  explicit DiscoveryLedger(std::vector<bool> consumer_malicious);

  /// Registers a new asset as never-before-seen. Ids must be dense and
  /// registered in increasing order.
  void register_asset(AssetId id, SimTime t_index);

  /// Earliest report wins; an exact time tie goes to the lower consumer id.
  void record_discovery(AssetId asset, ConsumerId consumer, SimTime t);

  /// Marks every asset with t_index <= horizon as seen by the consumer and
  /// records first discoveries for those it had not seen before. Returns the
  /// number of assets newly seen by this consumer.
  std::size_t record_horizon(ConsumerId consumer, SimTime horizon, SimTime t);

  std::size_t asset_count() const { return t_index_.size(); }
  std::size_t consumer_count() const { return malicious_.size(); }
  bool is_malicious(ConsumerId c) const { return malicious_.at(c); }
  SimTime t_index(AssetId id) const { return t_index_.at(id); }
  const FirstDiscovery& first(AssetId id) const { return first_.at(id); }
  std::size_t seen_by(ConsumerId c) const { return watermark_.at(c); }
  const std::vector<bool>& consumer_classes() const { return malicious_; }

 private:
  std::vector<bool> malicious_;
  std::vector<SimTime> t_index_;
  std::vector<FirstDiscovery> first_;
  std::vector<std::size_t> watermark_;
};

struct ShareCounts {
  std::size_t total_assets = 0;       // assets inside the accounting window
  std::size_t discovered_assets = 0;  // of which discovered by anyone
  std::size_t malicious_first = 0;    // of which first discovered by a malicious consumer
};

/// Counts assets with t_index >= window_start_ms.
ShareCounts discovery_counts(const DiscoveryLedger& ledger, SimTime window_start_ms = 0.0);

/// Fraction of discovered assets first discovered by malicious consumers.
/// Empty when nothing was discovered.
std::optional<double> malicious_dnbsa_share(const DiscoveryLedger& ledger,
                                            SimTime window_start_ms = 0.0);
std::optional<double> malicious_dnbsa_share(const ShareCounts& counts);

struct ExodusThresholds {
  double delay = 0.0;
  double cuckoo_d = 0.0;
  double cuckoo_c_satur = 0.0;
};

/// Malicious-provider fractions beyond which honest capacity no longer
/// covers the relevant request load.
ExodusThresholds exodus_thresholds(double rho, double c_m);

struct Percentiles {
  std::size_t count = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
};

/// Linear-interpolation percentiles over an unsorted sample.
Percentiles percentiles(std::vector<double> values);

struct RunSummary {
  std::optional<double> malicious_dnbsa_share;
  ShareCounts shares;
  Percentiles honest_latency;     // t_recv - t_gen, honest consumers
  Percentiles malicious_latency;  // t_recv - t_gen, malicious consumers
  Percentiles freshness;          // t_recv - asset_horizon, non-empty responses
  double mean_in_tee_wait_ms = 0.0;
  std::size_t requests_completed = 0;
  std::vector<std::uint64_t> served_per_provider;
  std::string config_fingerprint;
  std::uint64_t seed = 0;
};

/// Latency, throughput and freshness statistics over completed requests.
/// Incomplete records are ignored.
RunSummary latency_throughput_summary(std::span<const RequestRecord> records,
                                      const std::vector<bool>& consumer_malicious,
                                      std::size_t n_providers);

}  // namespace coolsim
