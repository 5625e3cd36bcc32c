#include "coolsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coolsim {

std::string attack_flags_to_string(std::uint8_t flags) {
  if (flags == kFlagNone) return "-";
  std::string out;
  auto add = [&](std::uint8_t bit, const char* name) {
    if (!(flags & bit)) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  add(kFlagDelayed, "delay");
  add(kFlagContent, "content");
  add(kFlagExternalQueue, "queue");
  add(kFlagFabricatedWait, "fabricated");
  add(kFlagCuckoo, "cuckoo");
  return out;
}

std::uint8_t attack_flags_from_string(const std::string& text) {
  if (text.empty() || text == "-") return kFlagNone;
  std::uint8_t flags = kFlagNone;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto bar = text.find('|', start);
    const std::string token = text.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
    if (token == "delay") flags |= kFlagDelayed;
    else if (token == "content") flags |= kFlagContent;
    else if (token == "queue") flags |= kFlagExternalQueue;
    else if (token == "fabricated") flags |= kFlagFabricatedWait;
    else if (token == "cuckoo") flags |= kFlagCuckoo;
    else throw std::invalid_argument("unknown attack flag '" + token + "'");
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return flags;
}

DiscoveryLedger::DiscoveryLedger(std::vector<bool> consumer_malicious)
    : malicious_(std::move(consumer_malicious)), watermark_(malicious_.size(), 0) {}

void DiscoveryLedger::register_asset(AssetId id, SimTime t_index) {
  if (id != t_index_.size()) {
    throw std::logic_error("asset " + std::to_string(id) + " registered twice or out of order");
  }
  if (!t_index_.empty() && t_index < t_index_.back()) {
    throw std::logic_error("asset index times must be non-decreasing");
  }
  t_index_.push_back(t_index);
  first_.emplace_back();
}

void DiscoveryLedger::record_discovery(AssetId asset, ConsumerId consumer, SimTime t) {
  auto& f = first_.at(asset);
  if (!f.discovered || t < f.t_first || (t == f.t_first && consumer < f.consumer)) {
    f.discovered = true;
    f.consumer = consumer;
    f.t_first = t;
  }
}

std::size_t DiscoveryLedger::record_horizon(ConsumerId consumer, SimTime horizon, SimTime t) {
  auto& wm = watermark_.at(consumer);
  const auto end = static_cast<std::size_t>(
      std::upper_bound(t_index_.begin(), t_index_.end(), horizon) - t_index_.begin());
  if (end <= wm) return 0;
  for (std::size_t a = wm; a < end; ++a) record_discovery(a, consumer, t);
  const std::size_t fresh = end - wm;
  wm = end;
  return fresh;
}

ShareCounts discovery_counts(const DiscoveryLedger& ledger, SimTime window_start_ms) {
  ShareCounts c;
  for (AssetId a = 0; a < ledger.asset_count(); ++a) {
    if (ledger.t_index(a) < window_start_ms) continue;
    ++c.total_assets;
    const auto& f = ledger.first(a);
    if (!f.discovered) continue;
    ++c.discovered_assets;
    if (ledger.is_malicious(f.consumer)) ++c.malicious_first;
  }
  return c;
}

std::optional<double> malicious_dnbsa_share(const ShareCounts& counts) {
  if (counts.discovered_assets == 0) return std::nullopt;
  return static_cast<double>(counts.malicious_first) /
         static_cast<double>(counts.discovered_assets);
}

std::optional<double> malicious_dnbsa_share(const DiscoveryLedger& ledger,
                                            SimTime window_start_ms) {
  return malicious_dnbsa_share(discovery_counts(ledger, window_start_ms));
}

ExodusThresholds exodus_thresholds(double rho, double c_m) {
  if (rho < 0.0 || rho > 1.0 || c_m < 0.0 || c_m > 1.0) {
    throw std::invalid_argument("exodus_thresholds: rho and c_M must lie in [0, 1]");
  }
  return ExodusThresholds{1.0 - (1.0 - c_m) * rho, 1.0 - rho, 1.0 - c_m};
}

Percentiles percentiles(std::vector<double> values) {
  Percentiles p;
  p.count = values.size();
  if (values.empty()) return p;
  std::sort(values.begin(), values.end());
  p.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  p.p50 = at(0.50);
  p.p90 = at(0.90);
  p.p99 = at(0.99);
  return p;
}

RunSummary latency_throughput_summary(std::span<const RequestRecord> records,
                                      const std::vector<bool>& consumer_malicious,
                                      std::size_t n_providers) {
  RunSummary s;
  s.served_per_provider.assign(n_providers, 0);
  std::vector<double> honest, malicious, fresh;
  double wait_sum = 0.0;
  for (const auto& r : records) {
    if (!r.completed()) continue;
    ++s.requests_completed;
    const double latency = r.t_recv - r.t_gen;
    if (r.consumer < consumer_malicious.size() && consumer_malicious[r.consumer]) {
      malicious.push_back(latency);
    } else {
      honest.push_back(latency);
    }
    if (r.provider < n_providers) ++s.served_per_provider[r.provider];
    if (r.asset_horizon > 0.0) fresh.push_back(r.t_recv - r.asset_horizon);
    wait_sum += r.in_tee_wait();
  }
  s.honest_latency = percentiles(std::move(honest));
  s.malicious_latency = percentiles(std::move(malicious));
  s.freshness = percentiles(std::move(fresh));
  if (s.requests_completed > 0) s.mean_in_tee_wait_ms = wait_sum / static_cast<double>(s.requests_completed);
  return s;
}

}  // namespace coolsim
