#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coolsim/metrics.hpp"
#include "coolsim/request.hpp"

namespace coolsim {

inline constexpr const char* kTraceHeader =
    "req_id,consumer_id,provider_id,t_gen,t_send,t_arrive,t_serv,t_recv,reported_wait_ms,"
    "asset_horizon,attack_flags";
inline constexpr const char* kDiscoveryHeader =
    "asset_id,t_index,discoverer_id,discoverer_class,t_first";

/// Shortest round-trip decimal form; identical bytes on every run.
std::string format_double(double v);

/// Completed requests only, in request-id order.
void write_trace_csv(std::ostream& out, std::span<const RequestRecord> records);
std::vector<RequestRecord> read_trace_csv(const std::filesystem::path& path);

/// Discovered assets only, in asset-id order.
void write_discovery_csv(std::ostream& out, const DiscoveryLedger& ledger);

struct DiscoveryRow {
  AssetId asset = 0;
  SimTime t_index = 0.0;
  ConsumerId discoverer = 0;
  bool malicious = false;
  SimTime t_first = 0.0;
};
std::vector<DiscoveryRow> read_discovery_csv(const std::filesystem::path& path);

nlohmann::json summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const nlohmann::json& j);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace coolsim
