#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coolsim/metrics.hpp"
#include "coolsim/scenario.hpp"

namespace coolsim {

/// Mean and spread of the malicious share over the seeds of one design point.
struct Aggregate {
  std::string config_fingerprint;
  std::size_t runs = 0;       // runs with a defined share
  std::size_t failed = 0;     // runs that threw
  double mean_share = 0.0;
  double stddev_share = 0.0;  // sample standard deviation (n - 1)
  std::vector<std::uint64_t> seeds;
  std::vector<double> shares;
  std::vector<std::string> errors;
};

/// Aggregates summaries; throws if their fingerprints differ.
Aggregate aggregate(const std::vector<RunSummary>& summaries);
nlohmann::json aggregate_to_json(const Aggregate& a);

struct RunOptions {
  unsigned jobs = 1;
  /// Overrides cfg.write_traces when set.
  std::optional<bool> write_traces;
};

/// Runs every seed of the config in memory, `jobs` at a time. Results are in
/// seed-list order regardless of scheduling.
std::vector<RunSummary> run_seeds(const ScenarioConfig& cfg, unsigned jobs = 1);

/// Runs every seed and writes, under out_dir:
///   config.json, aggregate.json, seed_<s>/{trace.csv,discovery.csv,summary.json}
Aggregate run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                       const RunOptions& options = {});

struct SweepSpec {
  ScenarioConfig base;
  std::string axis;                     // dotted config key, e.g. "p_m" or "psm.x"
  std::vector<nlohmann::json> values;
  std::size_t runs_per_point = 0;       // 0 keeps base.seeds, else seeds 1..n
};

struct SweepRow {
  nlohmann::json value;
  Aggregate aggregate;
  std::string error;  // non-empty when the point could not be configured
};

/// Applies a dotted-key override to a config. Throws ConfigError if the key
/// does not name an existing field or the result is invalid.
ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis,
                          const nlohmann::json& value);

/// Parses a CLI value: JSON if it parses, else a bare string.
nlohmann::json parse_axis_value(const std::string& text);

/// Runs every point; writes sweep.csv (one row per axis value) and, per
/// point, a run directory point_<i>/ when out_dir is non-empty.
std::vector<SweepRow> sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                            const RunOptions& options = {});

std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows);

/// Recomputes per-seed summaries and the aggregate of a run directory from
/// its stored traces, writes report.json, and returns the aggregate.
Aggregate report(const std::filesystem::path& run_dir);

}  // namespace coolsim
