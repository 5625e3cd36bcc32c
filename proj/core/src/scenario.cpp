#include "coolsim/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace coolsim {

using nlohmann::json;

std::string_view to_string(AttackKind a) {
  switch (a) {
    case AttackKind::kNone: return "none";
    case AttackKind::kContent: return "content";
    case AttackKind::kDelay: return "delay";
    case AttackKind::kCuckooC: return "cuckoo_c";
    case AttackKind::kCuckooD: return "cuckoo_d";
    case AttackKind::kQueueDelay: return "queue_delay";
  }
  return "unknown";
}

AttackKind attack_from_string(std::string_view name) {
  for (AttackKind a : {AttackKind::kNone, AttackKind::kContent, AttackKind::kDelay,
                       AttackKind::kCuckooC, AttackKind::kCuckooD, AttackKind::kQueueDelay}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown attack '" + std::string(name) + "'");
}

namespace {

std::string_view arrival_name(ArrivalKind k) {
  return k == ArrivalKind::kPoisson ? "poisson" : "periodic";
}

ArrivalKind arrival_from_string(const std::string& s) {
  if (s == "poisson") return ArrivalKind::kPoisson;
  if (s == "periodic") return ArrivalKind::kPeriodic;
  throw ConfigError("unknown arrival kind '" + s + "'");
}

std::string_view fabrication_name(NoTtFabrication f) {
  return f == NoTtFabrication::kAddDelay ? "add_delay" : "none";
}

NoTtFabrication fabrication_from_string(const std::string& s) {
  if (s == "add_delay") return NoTtFabrication::kAddDelay;
  if (s == "none") return NoTtFabrication::kNone;
  throw ConfigError("unknown no_tt_fabrication '" + s + "'");
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("key '") + key + "': " + e.what());
  }
}

json region_to_json(const RegionSpec& r) {
  return json{{"name", r.name},
              {"consumers", r.consumer_count},
              {"providers", r.provider_count},
              {"intra_median_ms", r.intra_median_ms},
              {"inter_region_ms", r.inter_region_ms}};
}

RegionSpec region_from_json(const json& j) {
  reject_unknown(j, {"name", "consumers", "providers", "intra_median_ms", "inter_region_ms"}, "region");
  RegionSpec r;
  read(j, "name", r.name);
  read(j, "consumers", r.consumer_count);
  read(j, "providers", r.provider_count);
  read(j, "intra_median_ms", r.intra_median_ms);
  read(j, "inter_region_ms", r.inter_region_ms);
  return r;
}

json psm_to_json(const PsmParams& p) {
  return json{{"s", p.s},
              {"c", p.c},
              {"a", p.a},
              {"x", p.x},
              {"k_p", p.k_p},
              {"k_d", p.k_d},
              {"update_every", p.update_every},
              {"hold_uniform_until_sampled", p.hold_uniform_until_sampled}};
}

PsmParams psm_from_json(const json& j) {
  reject_unknown(j, {"s", "c", "a", "x", "k_p", "k_d", "update_every", "hold_uniform_until_sampled"},
                 "psm");
  PsmParams p;
  read(j, "s", p.s);
  read(j, "c", p.c);
  read(j, "a", p.a);
  read(j, "x", p.x);
  read(j, "k_p", p.k_p);
  read(j, "k_d", p.k_d);
  read(j, "update_every", p.update_every);
  read(j, "hold_uniform_until_sampled", p.hold_uniform_until_sampled);
  return p;
}

}  // namespace

std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= 30; ++i) s.push_back(i);
  return s;
}

std::size_t ScenarioConfig::malicious_provider_count() const {
  return static_cast<std::size_t>(std::lround(p_m * static_cast<double>(n_providers)));
}

std::size_t ScenarioConfig::malicious_consumer_count() const {
  return static_cast<std::size_t>(std::lround(c_m * static_cast<double>(n_consumers)));
}

ScenarioConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"n_consumers", "n_providers", "topology", "rho", "c_m", "p_m", "attack",
                  "delta_att_ms", "trusted_time", "clock_error_sigma_ms", "no_tt_fabrication",
                  "no_tt_trust_reports", "policy", "k", "psm", "delta_psm_ms", "service_time_ms",
                  "request_arrival", "asset_arrival", "lambda_a", "horizon_s", "warmup_s", "seeds",
                  "cuckoo_queue_cap", "spot_malicious_ping_zero", "write_traces"},
                 "config");
  ScenarioConfig cfg;
  cfg.seeds = default_seeds();
  read(j, "n_consumers", cfg.n_consumers);
  read(j, "n_providers", cfg.n_providers);
  if (j.contains("topology")) {
    const json& t = j.at("topology");
    reject_unknown(t, {"kind", "base_rtt_ms", "regions", "access_sigma", "pair_spread", "path"},
                   "topology");
    std::string kind = "same_dc";
    read(t, "kind", kind);
    if (kind == "same_dc") {
      cfg.topology.kind = TopologyKind::kSameDc;
    } else if (kind == "multi_dc") {
      cfg.topology.kind = TopologyKind::kMultiDc;
      cfg.topology.regions = default_regions();
    } else if (kind == "csv") {
      cfg.topology.kind = TopologyKind::kCsv;
    } else {
      throw ConfigError("unknown topology kind '" + kind + "'");
    }
    read(t, "base_rtt_ms", cfg.topology.base_rtt_ms);
    read(t, "access_sigma", cfg.topology.options.access_sigma);
    read(t, "pair_spread", cfg.topology.options.pair_spread);
    if (t.contains("regions")) {
      cfg.topology.regions.clear();
      for (const auto& r : t.at("regions")) cfg.topology.regions.push_back(region_from_json(r));
    }
    std::string path;
    read(t, "path", path);
    cfg.topology.csv_path = path;
  }
  read(j, "rho", cfg.rho);
  read(j, "c_m", cfg.c_m);
  read(j, "p_m", cfg.p_m);
  if (j.contains("attack")) cfg.attack = attack_from_string(j.at("attack").get<std::string>());
  read(j, "delta_att_ms", cfg.delta_att_ms);
  read(j, "trusted_time", cfg.trusted_time);
  read(j, "clock_error_sigma_ms", cfg.clock_error_sigma_ms);
  if (j.contains("no_tt_fabrication")) {
    cfg.no_tt_fabrication = fabrication_from_string(j.at("no_tt_fabrication").get<std::string>());
  }
  read(j, "no_tt_trust_reports", cfg.no_tt_trust_reports);
  if (j.contains("policy")) {
    try {
      cfg.policy = policy_from_string(j.at("policy").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  read(j, "k", cfg.k);
  if (j.contains("psm")) cfg.psm = psm_from_json(j.at("psm"));
  read(j, "delta_psm_ms", cfg.delta_psm_ms);
  read(j, "service_time_ms", cfg.service_time_ms);
  if (j.contains("request_arrival")) {
    cfg.request_arrival = arrival_from_string(j.at("request_arrival").get<std::string>());
  }
  if (j.contains("asset_arrival")) {
    cfg.asset_arrival = arrival_from_string(j.at("asset_arrival").get<std::string>());
  }
  read(j, "lambda_a", cfg.lambda_a);
  read(j, "horizon_s", cfg.horizon_s);
  read(j, "warmup_s", cfg.warmup_s);
  read(j, "seeds", cfg.seeds);
  read(j, "cuckoo_queue_cap", cfg.cuckoo_queue_cap);
  read(j, "spot_malicious_ping_zero", cfg.spot_malicious_ping_zero);
  read(j, "write_traces", cfg.write_traces);
  return cfg;
}

json config_to_json(const ScenarioConfig& cfg) {
  json topo;
  switch (cfg.topology.kind) {
    case TopologyKind::kSameDc:
      topo = {{"kind", "same_dc"}, {"base_rtt_ms", cfg.topology.base_rtt_ms}};
      break;
    case TopologyKind::kMultiDc: {
      json regions = json::array();
      for (const auto& r : cfg.topology.regions) regions.push_back(region_to_json(r));
      topo = {{"kind", "multi_dc"},
              {"regions", regions},
              {"access_sigma", cfg.topology.options.access_sigma},
              {"pair_spread", cfg.topology.options.pair_spread}};
      break;
    }
    case TopologyKind::kCsv:
      topo = {{"kind", "csv"}, {"path", cfg.topology.csv_path.string()}};
      break;
  }
  return json{{"n_consumers", cfg.n_consumers},
              {"n_providers", cfg.n_providers},
              {"topology", topo},
              {"rho", cfg.rho},
              {"c_m", cfg.c_m},
              {"p_m", cfg.p_m},
              {"attack", to_string(cfg.attack)},
              {"delta_att_ms", cfg.delta_att_ms},
              {"trusted_time", cfg.trusted_time},
              {"clock_error_sigma_ms", cfg.clock_error_sigma_ms},
              {"no_tt_fabrication", fabrication_name(cfg.no_tt_fabrication)},
              {"no_tt_trust_reports", cfg.no_tt_trust_reports},
              {"policy", to_string(cfg.policy)},
              {"k", cfg.k},
              {"psm", psm_to_json(cfg.psm)},
              {"delta_psm_ms", cfg.delta_psm_ms},
              {"service_time_ms", cfg.service_time_ms},
              {"request_arrival", arrival_name(cfg.request_arrival)},
              {"asset_arrival", arrival_name(cfg.asset_arrival)},
              {"lambda_a", cfg.lambda_a},
              {"horizon_s", cfg.horizon_s},
              {"warmup_s", cfg.warmup_s},
              {"seeds", cfg.seeds},
              {"cuckoo_queue_cap", cfg.cuckoo_queue_cap},
              {"spot_malicious_ping_zero", cfg.spot_malicious_ping_zero},
              {"write_traces", cfg.write_traces}};
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_fingerprint(const ScenarioConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("seeds");
  j.erase("write_traces");
  // nlohmann objects are key-sorted, so dump() is canonical.
  const std::uint64_t h = fnv1a64(j.dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void check_fraction(ValidationReport& r, const char* field, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    r.errors.push_back(std::string(field) + " = " + std::to_string(v) + " must lie in [0, 1]");
  }
}

}  // namespace

ValidationReport validate_config(const ScenarioConfig& cfg) {
  ValidationReport r;
  if (cfg.n_consumers < 1) r.errors.push_back("n_consumers must be >= 1");
  if (cfg.n_providers < 1) r.errors.push_back("n_providers must be >= 1");
  check_fraction(r, "rho", cfg.rho);
  check_fraction(r, "c_m", cfg.c_m);
  check_fraction(r, "p_m", cfg.p_m);
  if (!(cfg.rho > 0.0)) r.errors.push_back("rho must be > 0");
  if (!(cfg.service_time_ms > 0.0)) r.errors.push_back("service_time_ms must be > 0");
  if (!(cfg.lambda_a > 0.0)) r.errors.push_back("lambda_a must be > 0");
  if (cfg.delta_att_ms < 0.0) r.errors.push_back("delta_att_ms must be >= 0");
  if (cfg.delta_psm_ms < 0.0) r.errors.push_back("delta_psm_ms must be >= 0");
  if (cfg.clock_error_sigma_ms < 0.0) r.errors.push_back("clock_error_sigma_ms must be >= 0");
  if (!(cfg.horizon_s > cfg.warmup_s)) {
    r.errors.push_back("horizon_s = " + std::to_string(cfg.horizon_s) +
                       " must exceed warmup_s = " + std::to_string(cfg.warmup_s));
  }
  if (cfg.warmup_s < 0.0) r.errors.push_back("warmup_s must be >= 0");
  if (cfg.seeds.empty()) r.errors.push_back("seeds must not be empty");
  if (cfg.k < 1 || cfg.k > cfg.n_providers) {
    r.errors.push_back("k = " + std::to_string(cfg.k) + " must lie in [1, n_providers]");
  }
  try {
    cfg.psm.validate();
  } catch (const std::invalid_argument& e) {
    r.errors.push_back(e.what());
  }

  if (cfg.topology.kind == TopologyKind::kMultiDc) {
    if (cfg.topology.regions.empty()) r.errors.push_back("topology.regions must not be empty");
    std::size_t nc = 0, np = 0;
    for (const auto& reg : cfg.topology.regions) {
      nc += reg.consumer_count;
      np += reg.provider_count;
      if (!(reg.intra_median_ms > 0.0)) {
        r.errors.push_back("region " + reg.name + ": intra_median_ms must be > 0");
      }
      if (reg.inter_region_ms.size() < cfg.topology.regions.size()) {
        r.errors.push_back("region " + reg.name + ": inter_region_ms needs one entry per region");
      }
    }
    if (nc != cfg.n_consumers) {
      r.errors.push_back("regions declare " + std::to_string(nc) + " consumers, n_consumers = " +
                         std::to_string(cfg.n_consumers));
    }
    if (np != cfg.n_providers) {
      r.errors.push_back("regions declare " + std::to_string(np) + " providers, n_providers = " +
                         std::to_string(cfg.n_providers));
    }
  } else if (cfg.topology.kind == TopologyKind::kCsv) {
    if (cfg.topology.csv_path.empty()) r.errors.push_back("topology.path is required for csv");
  } else if (cfg.topology.base_rtt_ms < 0.0) {
    r.errors.push_back("topology.base_rtt_ms must be >= 0");
  }

  if (cfg.attack == AttackKind::kQueueDelay && cfg.policy != Policy::kCoolPot &&
      cfg.policy != Policy::kSpot) {
    r.warnings.push_back("queue attack has no probe channel under policy " +
                         std::string(to_string(cfg.policy)));
  }
  if ((cfg.attack == AttackKind::kContent || cfg.attack == AttackKind::kCuckooC) &&
      cfg.effective_trusted_time()) {
    r.warnings.push_back("content attacks model providers without TEEs; trusted time is moot");
  }
  if (cfg.attack != AttackKind::kNone && cfg.malicious_provider_count() == 0 &&
      cfg.attack != AttackKind::kCuckooC && cfg.attack != AttackKind::kCuckooD) {
    r.warnings.push_back("attack configured but p_m rounds to zero malicious providers");
  }

  if (r.errors.empty()) {
    r.lambda_r_per_s = per_consumer_rate(cfg.rho, cfg.n_providers, cfg.service_time_ms, cfg.n_consumers);
    r.per_provider_load = cfg.rho * static_cast<double>(cfg.k);
    r.malicious_providers = cfg.malicious_provider_count();
    r.malicious_consumers = cfg.malicious_consumer_count();
    r.thresholds = exodus_thresholds(cfg.rho, cfg.c_m);
  }
  return r;
}

std::vector<bool> choose_malicious(const std::vector<std::size_t>& region_of, std::size_t count) {
  const std::size_t n = region_of.size();
  std::vector<bool> out(n, false);
  if (count >= n) {
    out.assign(n, true);
    return out;
  }
  std::size_t n_regions = 0;
  for (auto r : region_of) n_regions = std::max(n_regions, r + 1);
  // Members of each region, highest id first.
  std::vector<std::vector<std::size_t>> members(n_regions);
  for (std::size_t i = n; i-- > 0;) members[region_of[i]].push_back(i);
  std::vector<std::size_t> cursor(n_regions, 0);
  std::size_t picked = 0;
  while (picked < count) {
    for (std::size_t r = 0; r < n_regions && picked < count; ++r) {
      if (cursor[r] < members[r].size()) {
        out[members[r][cursor[r]++]] = true;
        ++picked;
      }
    }
  }
  return out;
}

}  // namespace coolsim
