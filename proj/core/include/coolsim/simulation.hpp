#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "coolsim/consumer.hpp"
#include "coolsim/market.hpp"
#include "coolsim/metrics.hpp"
#include "coolsim/provider.hpp"
#include "coolsim/scenario.hpp"
#include "coolsim/sim_engine.hpp"
#include "coolsim/topology.hpp"

namespace coolsim {

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<RequestRecord> records;
  std::unique_ptr<DiscoveryLedger> ledger;
  RunSummary summary;
  RunStats stats;
  std::vector<bool> consumer_malicious;
  std::vector<bool> provider_malicious;
};

/// One fully wired run: topology, market, providers and consumers on a
/// private engine. Nothing is shared between instances.
class Simulation final : public ProviderView {
 public:
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed);
  /// Uses a prebuilt latency matrix (must match the config's dimensions).
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed, LatencyMatrix matrix);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  RunResult run();

  const LatencyMatrix& topology() const { return matrix_; }
  const std::vector<Provider>& providers() const { return providers_; }
  const std::vector<Consumer>& consumers() const { return consumers_; }
  Engine& engine() { return engine_; }

  // ProviderView
  std::size_t n_providers() const override { return providers_.size(); }
  std::size_t report_queue_length(ProviderId p) const override {
    return providers_[p].report_queue_length();
  }
  const std::vector<ProviderId>& honest_providers() const override { return honest_ids_; }
  const std::vector<ProviderId>& malicious_providers() const override { return malicious_ids_; }

 private:
  void wire();
  void dispatch(const Event& ev);
  void on_request_generated(ConsumerId c);
  void on_request_arrives(RequestId r);
  void on_service_start(ProviderId p);
  void on_service_end(ProviderId p);
  void on_response_arrives(RequestId r);
  void on_asset_arrives();
  void kick(ProviderId p);

  ScenarioConfig cfg_;
  std::uint64_t seed_;
  LatencyMatrix matrix_;
  std::vector<std::size_t> consumer_region_;
  std::vector<std::size_t> provider_region_;
  std::vector<bool> consumer_malicious_;
  std::vector<bool> provider_malicious_;
  std::vector<ProviderId> honest_ids_;
  std::vector<ProviderId> malicious_ids_;

  Engine engine_;
  std::vector<Provider> providers_;
  std::vector<std::uint8_t> start_pending_;
  std::vector<RequestId> in_service_;
  std::vector<Consumer> consumers_;
  std::unique_ptr<Market> market_;
  RngStream market_rng_;
  std::unique_ptr<DiscoveryLedger> ledger_;
  std::vector<RequestRecord> records_;
  RequestId next_group_ = 0;
};

/// Builds the latency matrix for a config and seed.
LatencyMatrix build_topology(const ScenarioConfig& cfg, std::uint64_t seed);

/// Runs one seed and fills in the summary (share, latency, fingerprint).
RunResult simulate(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace coolsim
