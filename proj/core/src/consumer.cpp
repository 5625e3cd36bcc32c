#include "coolsim/consumer.hpp"

#include <stdexcept>
#include <string>

namespace coolsim {

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::kCool: return "cool";
    case Policy::kCoolTt: return "cool_tt";
    case Policy::kDesearchRandom: return "desearch_random";
    case Policy::kDesearchBestRandom: return "desearch_best_random";
    case Policy::kMultiproviderK: return "multiprovider_k";
    case Policy::kCoolPot: return "cool_pot";
    case Policy::kSpot: return "spot";
  }
  return "unknown";
}

Policy policy_from_string(std::string_view name) {
  for (Policy p : {Policy::kCool, Policy::kCoolTt, Policy::kDesearchRandom,
                   Policy::kDesearchBestRandom, Policy::kMultiproviderK, Policy::kCoolPot,
                   Policy::kSpot}) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

void ConsumerBehavior::validate() const {
  if (cuckoo && honest) throw std::invalid_argument("a cuckoo consumer cannot be honest");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
}

Consumer::Consumer(ConsumerId id, ConsumerBehavior behavior, std::size_t n_providers,
                   const PsmParams& psm, ArrivalProcess arrivals, ConsumerOptions options,
                   RngStream arrival_rng, RngStream select_rng)
    : id_(id),
      behavior_(behavior),
      selection_(n_providers, psm),
      arrivals_(arrivals),
      options_(options),
      arrival_rng_(std::move(arrival_rng)),
      select_rng_(std::move(select_rng)) {
  behavior_.validate();
  if (behavior_.k > n_providers) throw std::invalid_argument("k exceeds provider count");
}

bool Consumer::uses_ratios() const {
  if (!behavior_.honest) return !behavior_.cuckoo;
  switch (behavior_.policy) {
    case Policy::kCool:
    case Policy::kCoolTt:
    case Policy::kMultiproviderK:
    case Policy::kCoolPot: return true;
    default: return false;
  }
}

std::vector<ProviderId> Consumer::choose_targets(const ProviderView& view, bool& cuckoo_flag) {
  cuckoo_flag = false;
  const auto ratios = selection_.ratios();

  if (behavior_.cuckoo) {
    const auto& honest = view.honest_providers();
    const auto& malicious = view.malicious_providers();
    if (!honest.empty()) {
      const ProviderId target = honest[select_rng_.uniform_index(honest.size())];
      const bool saturated = options_.cuckoo_queue_cap > 0 &&
                             view.report_queue_length(target) >= options_.cuckoo_queue_cap;
      if (!saturated || malicious.empty()) {
        cuckoo_flag = true;
        return {target};
      }
    }
    if (!malicious.empty()) return {malicious[select_rng_.uniform_index(malicious.size())]};
    return {select_provider(ratios, select_rng_)};
  }

  if (!behavior_.honest) return {select_provider(ratios, select_rng_)};

  switch (behavior_.policy) {
    case Policy::kCool:
    case Policy::kCoolTt:
      return {select_provider(ratios, select_rng_)};
    case Policy::kMultiproviderK:
      return select_multi_weighted(ratios, behavior_.k, select_rng_);
    case Policy::kDesearchRandom:
      return select_multi_uniform(view.n_providers(), behavior_.k, select_rng_);
    case Policy::kDesearchBestRandom: {
      const auto best = best_cluster(selection_.windows(), selection_.params());
      return {best[select_rng_.uniform_index(best.size())]};
    }
    case Policy::kCoolPot: {
      if (view.n_providers() < 2) return {0};
      const auto pair = select_multi_weighted(ratios, 2, select_rng_);
      return {select_pot({pair[0], pair[1]},
                         {view.report_queue_length(pair[0]), view.report_queue_length(pair[1])},
                         select_rng_)};
    }
    case Policy::kSpot: {
      if (estimates_.size() != view.n_providers()) {
        throw std::logic_error("sPoT consumer has no latency estimates");
      }
      return {select_spot(estimates_,
                          [&view](ProviderId p) { return view.report_queue_length(p); },
                          select_rng_)};
    }
  }
  throw std::logic_error("unhandled policy");
}

bool Consumer::on_response(ProviderId provider, double rtt, double reported_wait,
                           SimTime asset_horizon, SimTime now, DiscoveryLedger& ledger) {
  const bool due = selection_.record_sample(provider, rtt,
                                            options_.use_reported_wait ? reported_wait : 0.0);
  if (asset_horizon > 0.0) ledger.record_horizon(id_, asset_horizon, now);
  return due && uses_ratios();
}

double per_consumer_rate(double rho, std::size_t n_providers, double service_time_ms,
                         std::size_t n_consumers) {
  if (n_consumers == 0) throw std::invalid_argument("no consumers");
  return rho * static_cast<double>(n_providers) * (1000.0 / service_time_ms) /
         static_cast<double>(n_consumers);
}

}  // namespace coolsim
