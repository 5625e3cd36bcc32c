#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "coolsim/rng.hpp"

namespace coolsim {

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Consumer x provider round-trip times in milliseconds. One-way delay is
/// half the RTT and is used for both the request and response legs.
class LatencyMatrix {
 public:
  LatencyMatrix() = default;
  LatencyMatrix(std::size_t n_consumers, std::size_t n_providers, double fill = 0.0);

  std::size_t n_consumers() const { return n_consumers_; }
  std::size_t n_providers() const { return n_providers_; }

  double rtt(std::size_t consumer, std::size_t provider) const {
    return rtt_[consumer * n_providers_ + provider];
  }
  void set_rtt(std::size_t consumer, std::size_t provider, double value);
  double delay(std::size_t consumer, std::size_t provider) const {
    return rtt(consumer, provider) / 2.0;
  }

  /// Smallest RTT from a consumer to any provider.
  double min_rtt(std::size_t consumer) const;

  bool operator==(const LatencyMatrix&) const = default;

 private:
  std::size_t n_consumers_ = 0;
  std::size_t n_providers_ = 0;
  std::vector<double> rtt_;
};

struct RegionSpec {
  std::string name;
  std::size_t consumer_count = 0;
  std::size_t provider_count = 0;
  double intra_median_ms = 20.0;
  /// Baseline RTT to every region, indexed like the region list. The entry
  /// for the region itself is ignored.
  std::vector<double> inter_region_ms;
};

/// Consumers and providers are numbered region by region, in list order.
struct RegionLayout {
  std::vector<std::size_t> consumer_region;
  std::vector<std::size_t> provider_region;
};

struct TopologyOptions {
  /// Log-normal shape for a consumer's access RTT to its local region.
  double access_sigma = 0.35;
  /// Per-pair relative spread on top of the access RTT, uniform in
  /// [0, pair_spread).
  double pair_spread = 0.2;
};

/// Reads the `consumer_id,provider_id,rtt_ms` CSV. Dimensions are inferred
/// from the largest ids unless given explicitly (non-zero).
LatencyMatrix load_latency_matrix(const std::filesystem::path& path,
                                  std::size_t expect_consumers = 0,
                                  std::size_t expect_providers = 0);
void save_latency_matrix(const LatencyMatrix& matrix, const std::filesystem::path& path);

LatencyMatrix generate_same_dc(std::size_t n_consumers, std::size_t n_providers,
                               double base_rtt_ms);

LatencyMatrix generate_multi_dc(const std::vector<RegionSpec>& regions, RngStream& rng,
                                const TopologyOptions& options = {});

RegionLayout region_layout(const std::vector<RegionSpec>& regions);

/// Five-region layout (North America, South America, Europe, Asia, Oceania)
/// with 200 consumers each and 48 providers in total.
std::vector<RegionSpec> default_regions();

}  // namespace coolsim
