#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace coolsim {

/// 64-bit FNV-1a over raw bytes. Used for stream derivation and config
/// fingerprints; the constants are fixed so results are stable everywhere.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

/// xoshiro256** 1.0 seeded through splitmix64.
///
/// All derived draws (uniform, exponential, normal) are computed with plain
/// arithmetic rather than <random> distributions, whose output is
/// implementation-defined. Two streams built from the same (label, seed) pair
/// produce the same sequence on every conforming platform.
class RngStream {
 public:
  static constexpr std::string_view kAlgorithm = "xoshiro256**-1.0/splitmix64";

  RngStream(std::string label, std::uint64_t master_seed);

  const std::string& label() const { return label_; }
  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform integer on [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Exponential with the given mean, by inverse CDF on one uniform draw.
  double exponential(double mean);
  /// Standard normal via Box-Muller (consumes two uniforms per call).
  double normal();
  /// Log-normal with median exp(mu) and shape sigma.
  double lognormal(double mu, double sigma);

 private:
  std::string label_;
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
};

/// Builds the stream for an entity. The label must be non-empty.
RngStream rng_stream(std::string_view label, std::uint64_t master_seed);

}  // namespace coolsim
