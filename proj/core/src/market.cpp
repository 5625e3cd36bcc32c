#include "coolsim/market.hpp"

#include <stdexcept>

namespace coolsim {

SimTime next_arrival(const ArrivalProcess& process, SimTime now, RngStream& rng) {
  if (!(process.rate_per_s > 0.0)) throw std::invalid_argument("arrival rate must be > 0");
  const double mean_ms = 1000.0 / process.rate_per_s;
  switch (process.kind) {
    case ArrivalKind::kPeriodic: return now + mean_ms;
    case ArrivalKind::kPoisson: return now + rng.exponential(mean_ms);
  }
  return now + mean_ms;
}

Market::Market(std::size_t n_providers, ArrivalProcess process)
    : n_providers_(n_providers), process_(process) {
  if (!(process_.rate_per_s > 0.0)) throw std::invalid_argument("asset rate must be > 0");
}

Asset Market::create_asset(SimTime now) {
  Asset a{assets_.size(), now, now};
  assets_.push_back(a);
  broadcast_done_.push_back(false);
  return a;
}

std::vector<IndexEvent> Market::broadcast(const Asset& asset, SimTime now, DiscoveryLedger& ledger) {
  if (asset.id >= assets_.size()) throw std::invalid_argument("broadcast of unknown asset");
  if (broadcast_done_[asset.id]) {
    throw std::logic_error("asset " + std::to_string(asset.id) + " already broadcast");
  }
  broadcast_done_[asset.id] = true;
  assets_[asset.id].t_index = now;
  ledger.register_asset(asset.id, now);
  std::vector<IndexEvent> events;
  events.reserve(n_providers_);
  for (std::size_t p = 0; p < n_providers_; ++p) {
    events.push_back(IndexEvent{static_cast<ProviderId>(p), asset.id, now});
  }
  return events;
}

}  // namespace coolsim
