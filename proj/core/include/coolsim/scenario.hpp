#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coolsim/consumer.hpp"
#include "coolsim/market.hpp"
#include "coolsim/metrics.hpp"
#include "coolsim/provider.hpp"
#include "coolsim/selection.hpp"
#include "coolsim/topology.hpp"

namespace coolsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AttackKind { kNone, kContent, kDelay, kCuckooC, kCuckooD, kQueueDelay };

std::string_view to_string(AttackKind a);
AttackKind attack_from_string(std::string_view name);

enum class TopologyKind { kSameDc, kMultiDc, kCsv };

struct TopologyConfig {
  TopologyKind kind = TopologyKind::kSameDc;
  double base_rtt_ms = 0.0;                  // same_dc
  std::vector<RegionSpec> regions;           // multi_dc
  TopologyOptions options;                   // multi_dc
  std::filesystem::path csv_path;            // csv
};

/// Default seed list: 1..30.
std::vector<std::uint64_t> default_seeds();

/// Everything needed to reproduce one experiment design point.
struct ScenarioConfig {
  std::size_t n_consumers = 100;
  std::size_t n_providers = 8;
  TopologyConfig topology;
  double rho = 0.75;
  double c_m = 0.5;
  double p_m = 0.0;
  AttackKind attack = AttackKind::kNone;
  double delta_att_ms = 50.0;
  bool trusted_time = false;
  double clock_error_sigma_ms = 0.0;
  NoTtFabrication no_tt_fabrication = NoTtFabrication::kAddDelay;
  bool no_tt_trust_reports = false;
  Policy policy = Policy::kCool;
  std::size_t k = 1;
  PsmParams psm;
  double delta_psm_ms = 0.0;
  double service_time_ms = 6.25;
  ArrivalKind request_arrival = ArrivalKind::kPoisson;
  ArrivalKind asset_arrival = ArrivalKind::kPoisson;
  double lambda_a = 100.0;
  double horizon_s = 60.0;
  double warmup_s = 10.0;
  std::vector<std::uint64_t> seeds = default_seeds();
  std::size_t cuckoo_queue_cap = 16;
  bool spot_malicious_ping_zero = true;
  bool write_traces = true;

  /// Whether consumers may trust TEE-reported queue waits.
  bool effective_trusted_time() const { return trusted_time || policy == Policy::kCoolTt; }
  std::size_t malicious_provider_count() const;
  std::size_t malicious_consumer_count() const;
};

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Stable hash of the canonical config, excluding the seed list and output
/// switches. Runs that differ only in seeds share a fingerprint.
std::string config_fingerprint(const ScenarioConfig& cfg);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  double lambda_r_per_s = 0.0;
  double per_provider_load = 0.0;
  std::size_t malicious_providers = 0;
  std::size_t malicious_consumers = 0;
  ExodusThresholds thresholds;

  bool ok() const { return errors.empty(); }
};

ValidationReport validate_config(const ScenarioConfig& cfg);

/// Which ids are malicious. Single-region layouts take the highest ids;
/// multi-region layouts take the highest remaining id of each region in
/// round-robin order.
std::vector<bool> choose_malicious(const std::vector<std::size_t>& region_of, std::size_t count);

}  // namespace coolsim
