#include "coolsim/artifacts.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace coolsim {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

void write_trace_csv(std::ostream& out, std::span<const RequestRecord> records) {
  out << kTraceHeader << '\n';
  for (const auto& r : records) {
    if (!r.completed()) continue;
    out << r.id << ',' << r.consumer << ',' << r.provider << ',' << format_double(r.t_gen) << ','
        << format_double(r.t_send) << ',' << format_double(r.t_arrive) << ','
        << format_double(r.t_serv) << ',' << format_double(r.t_recv) << ','
        << format_double(r.reported_wait_ms) << ',' << format_double(r.asset_horizon) << ','
        << attack_flags_to_string(r.flags) << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_num(const std::string& s, const std::string& where) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error(where + ": cannot parse '" + s + "'");
  }
  return v;
}

std::ifstream open_with_header(const std::filesystem::path& path, const char* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != header) throw std::runtime_error(path.string() + ": unexpected header");
  return in;
}

}  // namespace

std::vector<RequestRecord> read_trace_csv(const std::filesystem::path& path) {
  auto in = open_with_header(path, kTraceHeader);
  std::vector<RequestRecord> out;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto where = path.string() + ": row " + std::to_string(row);
    const auto c = split(line);
    if (c.size() != 11) throw std::runtime_error(where + ": expected 11 fields");
    RequestRecord r;
    r.id = parse_num<RequestId>(c[0], where);
    r.consumer = parse_num<ConsumerId>(c[1], where);
    r.provider = parse_num<ProviderId>(c[2], where);
    r.t_gen = parse_num<double>(c[3], where);
    r.t_send = parse_num<double>(c[4], where);
    r.t_arrive = parse_num<double>(c[5], where);
    r.t_serv = parse_num<double>(c[6], where);
    r.t_recv = parse_num<double>(c[7], where);
    r.reported_wait_ms = parse_num<double>(c[8], where);
    r.asset_horizon = parse_num<double>(c[9], where);
    r.flags = attack_flags_from_string(c[10]);
    // The enclave entry time is not exported; the arrival time is its best
    // stand-in (exact for providers without a host-side queue).
    r.t_tee_enter = r.t_arrive;
    out.push_back(r);
  }
  return out;
}

void write_discovery_csv(std::ostream& out, const DiscoveryLedger& ledger) {
  out << kDiscoveryHeader << '\n';
  for (AssetId a = 0; a < ledger.asset_count(); ++a) {
    const auto& f = ledger.first(a);
    if (!f.discovered) continue;
    out << a << ',' << format_double(ledger.t_index(a)) << ',' << f.consumer << ','
        << (ledger.is_malicious(f.consumer) ? "malicious" : "honest") << ','
        << format_double(f.t_first) << '\n';
  }
}

std::vector<DiscoveryRow> read_discovery_csv(const std::filesystem::path& path) {
  auto in = open_with_header(path, kDiscoveryHeader);
  std::vector<DiscoveryRow> out;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto where = path.string() + ": row " + std::to_string(row);
    const auto c = split(line);
    if (c.size() != 5) throw std::runtime_error(where + ": expected 5 fields");
    DiscoveryRow d;
    d.asset = parse_num<AssetId>(c[0], where);
    d.t_index = parse_num<double>(c[1], where);
    d.discoverer = parse_num<ConsumerId>(c[2], where);
    if (c[3] == "malicious") d.malicious = true;
    else if (c[3] != "honest") throw std::runtime_error(where + ": bad discoverer_class");
    d.t_first = parse_num<double>(c[4], where);
    out.push_back(d);
  }
  return out;
}

namespace {

json percentiles_to_json(const Percentiles& p) {
  return json{{"count", p.count}, {"mean", p.mean}, {"p50", p.p50}, {"p90", p.p90}, {"p99", p.p99}};
}

Percentiles percentiles_from_json(const json& j) {
  Percentiles p;
  p.count = j.at("count").get<std::size_t>();
  p.mean = j.at("mean").get<double>();
  p.p50 = j.at("p50").get<double>();
  p.p90 = j.at("p90").get<double>();
  p.p99 = j.at("p99").get<double>();
  return p;
}

}  // namespace

json summary_to_json(const RunSummary& s) {
  json j;
  j["config_fingerprint"] = s.config_fingerprint;
  j["seed"] = s.seed;
  j["malicious_dnbsa_share"] = s.malicious_dnbsa_share ? json(*s.malicious_dnbsa_share) : json(nullptr);
  j["assets"] = {{"total", s.shares.total_assets},
                 {"discovered", s.shares.discovered_assets},
                 {"malicious_first", s.shares.malicious_first}};
  j["latency_ms"] = {{"honest", percentiles_to_json(s.honest_latency)},
                     {"malicious", percentiles_to_json(s.malicious_latency)}};
  j["freshness_ms"] = percentiles_to_json(s.freshness);
  j["mean_in_tee_wait_ms"] = s.mean_in_tee_wait_ms;
  j["requests_completed"] = s.requests_completed;
  j["served_per_provider"] = s.served_per_provider;
  return j;
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  s.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("malicious_dnbsa_share").is_null()) {
    s.malicious_dnbsa_share = j.at("malicious_dnbsa_share").get<double>();
  }
  s.shares.total_assets = j.at("assets").at("total").get<std::size_t>();
  s.shares.discovered_assets = j.at("assets").at("discovered").get<std::size_t>();
  s.shares.malicious_first = j.at("assets").at("malicious_first").get<std::size_t>();
  s.honest_latency = percentiles_from_json(j.at("latency_ms").at("honest"));
  s.malicious_latency = percentiles_from_json(j.at("latency_ms").at("malicious"));
  s.freshness = percentiles_from_json(j.at("freshness_ms"));
  s.mean_in_tee_wait_ms = j.at("mean_in_tee_wait_ms").get<double>();
  s.requests_completed = j.at("requests_completed").get<std::size_t>();
  s.served_per_provider = j.at("served_per_provider").get<std::vector<std::uint64_t>>();
  return s;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace coolsim
