#include "coolsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "coolsim/artifacts.hpp"
#include "coolsim/simulation.hpp"

namespace coolsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Calls fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::string seed_dir_name(std::uint64_t seed) { return "seed_" + std::to_string(seed); }

}  // namespace

Aggregate aggregate(const std::vector<RunSummary>& summaries) {
  Aggregate a;
  for (const auto& s : summaries) {
    if (a.config_fingerprint.empty()) {
      a.config_fingerprint = s.config_fingerprint;
    } else if (s.config_fingerprint != a.config_fingerprint) {
      throw std::runtime_error("refusing to aggregate runs with fingerprints " +
                               a.config_fingerprint + " and " + s.config_fingerprint);
    }
    if (!s.malicious_dnbsa_share) continue;
    a.seeds.push_back(s.seed);
    a.shares.push_back(*s.malicious_dnbsa_share);
  }
  a.runs = a.shares.size();
  if (a.runs > 0) {
    double sum = 0.0;
    for (double v : a.shares) sum += v;
    a.mean_share = sum / static_cast<double>(a.runs);
  }
  if (a.runs > 1) {
    double ss = 0.0;
    for (double v : a.shares) ss += (v - a.mean_share) * (v - a.mean_share);
    a.stddev_share = std::sqrt(ss / static_cast<double>(a.runs - 1));
  }
  return a;
}

json aggregate_to_json(const Aggregate& a) {
  return json{{"config_fingerprint", a.config_fingerprint},
              {"runs", a.runs},
              {"failed", a.failed},
              {"mean_share", a.mean_share},
              {"stddev_share", a.stddev_share},
              {"seeds", a.seeds},
              {"shares", a.shares},
              {"errors", a.errors}};
}

std::vector<RunSummary> run_seeds(const ScenarioConfig& cfg, unsigned jobs) {
  std::vector<RunSummary> out(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), jobs, [&](std::size_t i) {
    out[i] = simulate(cfg, cfg.seeds[i]).summary;
  });
  return out;
}

Aggregate run_scenario(const ScenarioConfig& cfg, const fs::path& out_dir, const RunOptions& options) {
  const auto report = validate_config(cfg);
  if (!report.ok()) {
    std::string msg = "invalid config:";
    for (const auto& e : report.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  const bool traces = options.write_traces.value_or(cfg.write_traces);
  fs::create_directories(out_dir);
  write_text_file(out_dir / "config.json", config_to_json(cfg).dump(2) + "\n");

  std::vector<RunSummary> summaries(cfg.seeds.size());
  std::vector<std::string> errors(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), options.jobs, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    try {
      RunResult r = simulate(cfg, seed);
      const fs::path dir = out_dir / seed_dir_name(seed);
      fs::create_directories(dir);
      if (traces) {
        std::ostringstream trace, disc;
        write_trace_csv(trace, r.records);
        write_discovery_csv(disc, *r.ledger);
        write_text_file(dir / "trace.csv", trace.str());
        write_text_file(dir / "discovery.csv", disc.str());
      }
      write_text_file(dir / "summary.json", summary_to_json(r.summary).dump(2) + "\n");
      summaries[i] = std::move(r.summary);
    } catch (const std::exception& e) {
      errors[i] = "seed " + std::to_string(seed) + ": " + e.what();
    }
  });

  std::vector<RunSummary> ok;
  Aggregate agg;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    if (errors[i].empty()) ok.push_back(summaries[i]);
  }
  agg = aggregate(ok);
  if (agg.config_fingerprint.empty()) agg.config_fingerprint = config_fingerprint(cfg);
  for (const auto& e : errors) {
    if (e.empty()) continue;
    ++agg.failed;
    agg.errors.push_back(e);
  }
  write_text_file(out_dir / "aggregate.json", aggregate_to_json(agg).dump(2) + "\n");
  return agg;
}

json parse_axis_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis, const json& value) {
  json j = config_to_json(base);
  json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = axis.find('.', start);
    const std::string key = axis.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) {
      throw ConfigError("sweep axis '" + axis + "' does not name a config field");
    }
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = value;
  ScenarioConfig cfg = config_from_json(j);
  const auto report = validate_config(cfg);
  if (!report.ok()) throw ConfigError("axis " + axis + "=" + value.dump() + ": " + report.errors.front());
  return cfg;
}

std::vector<SweepRow> sweep(const SweepSpec& spec, const fs::path& out_dir, const RunOptions& options) {
  std::vector<SweepRow> rows(spec.values.size());
  std::vector<ScenarioConfig> configs(spec.values.size());
  std::vector<bool> usable(spec.values.size(), false);
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    rows[i].value = spec.values[i];
    try {
      configs[i] = apply_axis(spec.base, spec.axis, spec.values[i]);
      if (spec.runs_per_point > 0) {
        configs[i].seeds.clear();
        for (std::uint64_t s = 1; s <= spec.runs_per_point; ++s) configs[i].seeds.push_back(s);
      }
      usable[i] = true;
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  }

  if (out_dir.empty()) {
    // In-memory: parallelize over every (point, seed) pair.
    struct Job {
      std::size_t point;
      std::size_t seed_index;
    };
    std::vector<Job> jobs;
    std::vector<std::vector<RunSummary>> results(spec.values.size());
    std::vector<std::vector<std::string>> errors(spec.values.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
      if (!usable[i]) continue;
      results[i].resize(configs[i].seeds.size());
      errors[i].resize(configs[i].seeds.size());
      for (std::size_t s = 0; s < configs[i].seeds.size(); ++s) jobs.push_back({i, s});
    }
    parallel_for(jobs.size(), options.jobs, [&](std::size_t n) {
      const auto [i, s] = jobs[n];
      try {
        results[i][s] = simulate(configs[i], configs[i].seeds[s]).summary;
      } catch (const std::exception& e) {
        errors[i][s] = e.what();
      }
    });
    for (std::size_t i = 0; i < configs.size(); ++i) {
      if (!usable[i]) continue;
      std::vector<RunSummary> ok;
      std::vector<std::string> errs;
      for (std::size_t s = 0; s < results[i].size(); ++s) {
        if (errors[i][s].empty()) ok.push_back(results[i][s]);
        else errs.push_back(errors[i][s]);
      }
      rows[i].aggregate = aggregate(ok);
      rows[i].aggregate.failed = errs.size();
      rows[i].aggregate.errors = errs;
      if (rows[i].aggregate.config_fingerprint.empty()) {
        rows[i].aggregate.config_fingerprint = config_fingerprint(configs[i]);
      }
    }
    return rows;
  }

  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!usable[i]) continue;
    try {
      rows[i].aggregate = run_scenario(configs[i], out_dir / ("point_" + std::to_string(i)), options);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  }
  write_text_file(out_dir / "sweep.csv", sweep_csv(spec.axis, rows));
  return rows;
}

std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "axis,value,config_fingerprint,runs,failed,mean_share,stddev_share,status\n";
  for (const auto& r : rows) {
    std::string value = r.value.is_string() ? r.value.get<std::string>() : r.value.dump();
    std::replace(value.begin(), value.end(), ',', ';');
    std::string status = r.error.empty() ? (r.aggregate.failed ? "partial" : "ok") : "error";
    out << axis << ',' << value << ',' << r.aggregate.config_fingerprint << ',' << r.aggregate.runs
        << ',' << r.aggregate.failed << ',' << format_double(r.aggregate.mean_share) << ','
        << format_double(r.aggregate.stddev_share) << ',' << status << '\n';
  }
  return out.str();
}

Aggregate report(const fs::path& run_dir) {
  const ScenarioConfig cfg = load_config(run_dir / "config.json");
  const std::string fingerprint = config_fingerprint(cfg);

  // Consumer classes follow from the config alone.
  std::vector<std::size_t> consumer_region(cfg.n_consumers, 0);
  if (cfg.topology.kind == TopologyKind::kMultiDc) {
    consumer_region = region_layout(cfg.topology.regions).consumer_region;
  }
  const auto consumer_malicious = choose_malicious(consumer_region, cfg.malicious_consumer_count());

  std::vector<RunSummary> summaries;
  Aggregate agg;
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path dir = run_dir / seed_dir_name(seed);
    try {
      const json stored = json::parse(read_text_file(dir / "summary.json"));
      if (stored.at("config_fingerprint").get<std::string>() != fingerprint) {
        throw std::runtime_error("fingerprint mismatch with config.json");
      }
      const auto records = read_trace_csv(dir / "trace.csv");
      RunSummary s = latency_throughput_summary(records, consumer_malicious, cfg.n_providers);
      const auto rows = read_discovery_csv(dir / "discovery.csv");
      // Every asset ever broadcast is not stored; the window total comes from
      // the run's own summary.
      s.shares.total_assets = stored.at("assets").at("total").get<std::size_t>();
      for (const auto& d : rows) {
        if (d.t_index < cfg.warmup_s * 1000.0) continue;
        ++s.shares.discovered_assets;
        if (d.malicious) ++s.shares.malicious_first;
      }
      s.malicious_dnbsa_share = malicious_dnbsa_share(s.shares);
      s.config_fingerprint = fingerprint;
      s.seed = seed;
      summaries.push_back(std::move(s));
    } catch (const std::exception& e) {
      agg.errors.push_back("seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  const auto failed = agg.errors;
  agg = aggregate(summaries);
  if (agg.config_fingerprint.empty()) agg.config_fingerprint = fingerprint;
  agg.errors = failed;
  agg.failed = failed.size();

  json out = aggregate_to_json(agg);
  json per_seed = json::array();
  for (const auto& s : summaries) per_seed.push_back(summary_to_json(s));
  out["per_seed"] = per_seed;
  write_text_file(run_dir / "report.json", out.dump(2) + "\n");
  return agg;
}

}  // namespace coolsim
