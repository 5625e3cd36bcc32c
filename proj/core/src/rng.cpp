#include "coolsim/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace coolsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::string label, std::uint64_t master_seed)
    : label_(std::move(label)), seed_(master_seed) {
  if (label_.empty()) throw std::invalid_argument("rng stream label must be non-empty");
  // Mix the seed into the label hash byte by byte (little-endian) so the
  // derivation does not depend on host endianness.
  std::uint64_t h = fnv1a64(label_);
  for (int i = 0; i < 8; ++i) {
    h ^= (master_seed >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t sm = h;
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // Lemire-style rejection keeps the result unbiased.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double RngStream::exponential(double mean) {
  return -mean * std::log1p(-uniform());
}

double RngStream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::lognormal(double mu, double sigma) {
  return std::exp(mu + sigma * normal());
}

RngStream rng_stream(std::string_view label, std::uint64_t master_seed) {
  return RngStream(std::string(label), master_seed);
}

}  // namespace coolsim
