#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coolsim/runner.hpp"
#include "coolsim/scenario.hpp"

namespace {

using coolsim::ScenarioConfig;

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) return {std::stoull(text)};
    const std::uint64_t lo = std::stoull(text.substr(0, dots));
    const std::uint64_t hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty range");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  } catch (const std::logic_error&) {
    throw coolsim::ConfigError("--seeds expects N or A..B, got '" + text + "'");
  }
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : text) {
    if (ch == '[' || ch == '{') ++depth;
    if (ch == ']' || ch == '}') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct Common {
  std::string config;
  std::string seeds;
  std::vector<std::string> overrides;
};

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg = c.config.empty() ? ScenarioConfig{} : coolsim::load_config(c.config);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw coolsim::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg = coolsim::apply_axis(cfg, kv.substr(0, eq), coolsim::parse_axis_value(kv.substr(eq + 1)));
  }
  if (!c.seeds.empty()) cfg.seeds = parse_seed_range(c.seeds);
  return cfg;
}

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "Scenario JSON file");
  if (config_required) opt->required();
  cmd->add_option("--seeds", c.seeds, "Seed or inclusive range A..B");
  cmd->add_option("--set", c.overrides, "Override a config field, key=value (repeatable)");
}

void print_aggregate(const coolsim::Aggregate& a) {
  std::cout << "fingerprint " << a.config_fingerprint << "  runs " << a.runs << "  failed " << a.failed
            << "  share " << a.mean_share << " +/- " << a.stddev_share << '\n';
  for (const auto& e : a.errors) std::cerr << "error: " << e << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for TEE-backed search provider selection"};
  app.require_subcommand(1);

  Common validate_opts, run_opts, sweep_opts;
  std::string run_out, sweep_out, report_dir, axis, values;
  unsigned jobs = 1;
  std::size_t runs_per_point = 0;
  bool no_traces = false;

  auto* validate = app.add_subcommand("validate", "Check a config and print derived quantities");
  add_common(validate, validate_opts, true);

  auto* run = app.add_subcommand("run", "Run every seed of a scenario");
  add_common(run, run_opts, false);
  run->add_option("--out", run_out, "Output directory")->required();
  run->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  run->add_flag("--no-traces", no_traces, "Skip trace.csv and discovery.csv");

  auto* sw = app.add_subcommand("sweep", "Vary one config field across values");
  add_common(sw, sweep_opts, false);
  sw->add_option("--axis", axis, "Dotted config key, e.g. p_m or psm.x")->required();
  sw->add_option("--values", values, "Comma-separated JSON values")->required();
  sw->add_option("--out", sweep_out, "Output directory")->required();
  sw->add_option("--runs", runs_per_point, "Seeds 1..N per point (default: config seeds)");
  sw->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  sw->add_flag("--no-traces", no_traces, "Skip trace.csv and discovery.csv");

  auto* rep = app.add_subcommand("report", "Recompute aggregates from a run directory");
  rep->add_option("--out", report_dir, "Run directory written by `run`")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    coolsim::RunOptions options;
    options.jobs = jobs;
    if (no_traces) options.write_traces = false;

    if (*validate) {
      const auto cfg = load(validate_opts);
      const auto r = coolsim::validate_config(cfg);
      std::cout << "fingerprint          " << coolsim::config_fingerprint(cfg) << '\n'
                << "lambda_r per consumer " << r.lambda_r_per_s << " req/s\n"
                << "per-provider load     " << r.per_provider_load << '\n'
                << "malicious providers   " << r.malicious_providers << '\n'
                << "malicious consumers   " << r.malicious_consumers << '\n'
                << "exodus thresholds     delay " << r.thresholds.delay << "  cuckoo_d "
                << r.thresholds.cuckoo_d << "  cuckoo_c " << r.thresholds.cuckoo_c_satur << '\n';
      for (const auto& w : r.warnings) std::cout << "warning: " << w << '\n';
      for (const auto& e : r.errors) std::cerr << "error: " << e << '\n';
      return r.ok() ? 0 : 1;
    }
    if (*run) {
      const auto agg = coolsim::run_scenario(load(run_opts), run_out, options);
      print_aggregate(agg);
      return agg.failed == 0 && agg.runs > 0 ? 0 : 1;
    }
    if (*sw) {
      coolsim::SweepSpec spec;
      spec.base = load(sweep_opts);
      spec.axis = axis;
      spec.runs_per_point = runs_per_point;
      for (const auto& v : split_values(values)) spec.values.push_back(coolsim::parse_axis_value(v));
      const auto rows = coolsim::sweep(spec, sweep_out, options);
      std::cout << coolsim::sweep_csv(axis, rows);
      bool ok = true;
      for (const auto& r : rows) {
        if (!r.error.empty()) std::cerr << "error: " << axis << '=' << r.value.dump() << ": " << r.error << '\n';
        ok = ok && r.error.empty() && r.aggregate.failed == 0;
      }
      return ok ? 0 : 1;
    }
    if (*rep) {
      const auto agg = coolsim::report(report_dir);
      print_aggregate(agg);
      return agg.failed == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
