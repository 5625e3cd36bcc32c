#pragma once

#include <cstdint>
#include <string>

#include "coolsim/sim_engine.hpp"

namespace coolsim {

using ConsumerId = std::uint32_t;
using ProviderId = std::uint32_t;
using RequestId = std::uint64_t;
using AssetId = std::uint64_t;

/// Attack behaviour a request ran into, as a bit set.
enum AttackFlag : std::uint8_t {
  kFlagNone = 0,
  kFlagDelayed = 1u << 0,
  kFlagContent = 1u << 1,
  kFlagExternalQueue = 1u << 2,
  kFlagFabricatedWait = 1u << 3,
  kFlagCuckoo = 1u << 4,
};

std::string attack_flags_to_string(std::uint8_t flags);
std::uint8_t attack_flags_from_string(const std::string& text);

/// Lifecycle of one request copy. Timestamps are filled as the request moves
/// through the pipeline; t_recv stays negative until the response arrives.
struct RequestRecord {
  RequestId id = 0;
  RequestId group = 0;  // shared by the k copies of a multiprovider request
  ConsumerId consumer = 0;
  ProviderId provider = 0;
  SimTime t_gen = 0.0;
  SimTime t_send = 0.0;
  SimTime t_arrive = -1.0;
  SimTime t_tee_enter = -1.0;
  SimTime t_serv = -1.0;
  SimTime t_recv = -1.0;
  double reported_wait_ms = 0.0;
  SimTime asset_horizon = -1.0;
  std::uint8_t flags = kFlagNone;

  bool completed() const { return t_recv >= 0.0; }
  double in_tee_wait() const { return t_serv - t_tee_enter; }
};

/// What a provider hands back after serving a request.
struct SearchResponse {
  RequestId request_id = 0;
  SimTime asset_horizon = 0.0;
  double reported_queue_wait = 0.0;
  SimTime t_depart = 0.0;
  std::uint8_t flags = kFlagNone;
};

}  // namespace coolsim
