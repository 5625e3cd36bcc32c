#pragma once

#include <cstddef>
#include <vector>

#include "coolsim/metrics.hpp"
#include "coolsim/request.hpp"
#include "coolsim/rng.hpp"

namespace coolsim {

struct Asset {
  AssetId id = 0;
  SimTime t_created = 0.0;
  SimTime t_index = 0.0;
};

enum class ArrivalKind { kPoisson, kPeriodic };

struct ArrivalProcess {
  ArrivalKind kind = ArrivalKind::kPoisson;
  double rate_per_s = 100.0;
};

/// Next event time after `now`. Poisson draws one uniform from the stream;
/// periodic is exactly 1000 / rate ms later and does not touch the stream.
SimTime next_arrival(const ArrivalProcess& process, SimTime now, RngStream& rng);

struct IndexEvent {
  ProviderId provider = 0;
  AssetId asset = 0;
  SimTime t_index = 0.0;
};

/// Asset source. Every provider indexes a new asset at the instant it is
/// created, so all providers always hold the same index.
class Market {
 public:
  Market(std::size_t n_providers, ArrivalProcess process);

  const ArrivalProcess& process() const { return process_; }
  const std::vector<Asset>& assets() const { return assets_; }

  /// Creates the next asset at `now` (not yet broadcast).
  Asset create_asset(SimTime now);

  /// Sends an asset to every provider and registers it with the ledger as
  /// never-before-seen. Throws on a second broadcast of the same asset.
  std::vector<IndexEvent> broadcast(const Asset& asset, SimTime now, DiscoveryLedger& ledger);

 private:
  std::size_t n_providers_;
  ArrivalProcess process_;
  std::vector<Asset> assets_;
  std::vector<bool> broadcast_done_;
};

}  // namespace coolsim
