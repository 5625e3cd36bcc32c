#include "coolsim/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace coolsim {

LatencyMatrix::LatencyMatrix(std::size_t n_consumers, std::size_t n_providers, double fill)
    : n_consumers_(n_consumers),
      n_providers_(n_providers),
      rtt_(n_consumers * n_providers, fill) {
  if (!std::isfinite(fill) || fill < 0.0) {
    throw std::invalid_argument("latency must be finite and non-negative");
  }
}

void LatencyMatrix::set_rtt(std::size_t consumer, std::size_t provider, double value) {
  if (consumer >= n_consumers_ || provider >= n_providers_) {
    throw std::out_of_range("latency matrix index out of range");
  }
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument("latency must be finite and non-negative");
  }
  rtt_[consumer * n_providers_ + provider] = value;
}

double LatencyMatrix::min_rtt(std::size_t consumer) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n_providers_; ++p) best = std::min(best, rtt(consumer, p));
  return best;
}

namespace {

template <typename T>
bool parse_field(std::string_view text, T& out) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

LatencyMatrix load_latency_matrix(const std::filesystem::path& path,
                                  std::size_t expect_consumers,
                                  std::size_t expect_providers) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open latency file " + path.string());

  struct Row {
    std::size_t consumer, provider;
    double rtt;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw LoadError(path.string() + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "consumer_id,provider_id,rtt_ms") {
    throw LoadError(path.string() + ": row 1: expected header consumer_id,provider_id,rtt_ms");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto where = path.string() + ": row " + std::to_string(line_no) + ": ";
    std::string_view view(line);
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = view.find(',', start);
      cells.push_back(view.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 3) throw LoadError(where + "expected 3 fields, got " + std::to_string(cells.size()));
    Row row{};
    if (!parse_field(cells[0], row.consumer)) throw LoadError(where + "bad consumer_id");
    if (!parse_field(cells[1], row.provider)) throw LoadError(where + "bad provider_id");
    if (!parse_field(cells[2], row.rtt) || !std::isfinite(row.rtt)) throw LoadError(where + "bad rtt_ms");
    if (row.rtt < 0.0) throw LoadError(where + "negative latency");
    rows.push_back(row);
  }
  if (rows.empty()) throw LoadError(path.string() + ": no latency rows");

  std::size_t n_c = expect_consumers, n_p = expect_providers;
  if (n_c == 0 || n_p == 0) {
    std::size_t max_c = 0, max_p = 0;
    for (const auto& r : rows) {
      max_c = std::max(max_c, r.consumer);
      max_p = std::max(max_p, r.provider);
    }
    if (n_c == 0) n_c = max_c + 1;
    if (n_p == 0) n_p = max_p + 1;
  }

  LatencyMatrix m(n_c, n_p);
  std::vector<char> seen(n_c * n_p, 0);
  for (const auto& r : rows) {
    if (r.consumer >= n_c || r.provider >= n_p) {
      throw LoadError(path.string() + ": pair (" + std::to_string(r.consumer) + "," +
                      std::to_string(r.provider) + ") outside declared " + std::to_string(n_c) +
                      "x" + std::to_string(n_p));
    }
    auto& flag = seen[r.consumer * n_p + r.provider];
    if (flag) {
      throw LoadError(path.string() + ": duplicate pair (" + std::to_string(r.consumer) + "," +
                      std::to_string(r.provider) + ")");
    }
    flag = 1;
    m.set_rtt(r.consumer, r.provider, r.rtt);
  }
  for (std::size_t c = 0; c < n_c; ++c) {
    for (std::size_t p = 0; p < n_p; ++p) {
      if (!seen[c * n_p + p]) {
        throw LoadError(path.string() + ": row for consumer " + std::to_string(c) +
                        " is missing provider " + std::to_string(p));
      }
    }
  }
  return m;
}

void save_latency_matrix(const LatencyMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write latency file " + path.string());
  out << "consumer_id,provider_id,rtt_ms\n";
  char buf[64];
  for (std::size_t c = 0; c < matrix.n_consumers(); ++c) {
    for (std::size_t p = 0; p < matrix.n_providers(); ++p) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, matrix.rtt(c, p));
      out << c << ',' << p << ',' << std::string_view(buf, end - buf) << '\n';
    }
  }
}

LatencyMatrix generate_same_dc(std::size_t n_consumers, std::size_t n_providers,
                               double base_rtt_ms) {
  if (n_consumers == 0 || n_providers == 0) {
    throw std::invalid_argument("same-datacenter topology needs at least one consumer and provider");
  }
  return LatencyMatrix(n_consumers, n_providers, base_rtt_ms);
}

RegionLayout region_layout(const std::vector<RegionSpec>& regions) {
  RegionLayout layout;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    layout.consumer_region.insert(layout.consumer_region.end(), regions[r].consumer_count, r);
    layout.provider_region.insert(layout.provider_region.end(), regions[r].provider_count, r);
  }
  return layout;
}

LatencyMatrix generate_multi_dc(const std::vector<RegionSpec>& regions, RngStream& rng,
                                const TopologyOptions& options) {
  if (regions.empty()) throw std::invalid_argument("multi-datacenter topology needs at least one region");
  for (const auto& r : regions) {
    if (!(r.intra_median_ms > 0.0)) {
      throw std::invalid_argument("region " + r.name + ": intra_median_ms must be > 0");
    }
  }
  const RegionLayout layout = region_layout(regions);
  const std::size_t n_c = layout.consumer_region.size();
  const std::size_t n_p = layout.provider_region.size();
  if (n_c == 0 || n_p == 0) throw std::invalid_argument("regions declare no consumers or no providers");

  LatencyMatrix m(n_c, n_p);
  for (std::size_t c = 0; c < n_c; ++c) {
    const auto& home = regions[layout.consumer_region[c]];
    const double access = rng.lognormal(std::log(home.intra_median_ms), options.access_sigma);
    for (std::size_t p = 0; p < n_p; ++p) {
      const std::size_t pr = layout.provider_region[p];
      double base = 0.0;
      if (pr != layout.consumer_region[c]) {
        if (pr >= home.inter_region_ms.size()) {
          throw std::invalid_argument("region " + home.name + ": inter_region_ms too short");
        }
        base = home.inter_region_ms[pr];
      }
      m.set_rtt(c, p, base + access * (1.0 + options.pair_spread * rng.uniform()));
    }
  }
  return m;
}

std::vector<RegionSpec> default_regions() {
  // Order: North America, South America, Europe, Asia, Oceania.
  return {
      {"north_america", 200, 14, 20.0, {0.0, 120.0, 80.0, 150.0, 160.0}},
      {"south_america", 200, 4, 40.0, {120.0, 0.0, 190.0, 280.0, 300.0}},
      {"europe", 200, 14, 15.0, {80.0, 190.0, 0.0, 160.0, 260.0}},
      {"asia", 200, 12, 30.0, {150.0, 280.0, 160.0, 0.0, 110.0}},
      {"oceania", 200, 4, 25.0, {160.0, 300.0, 260.0, 110.0, 0.0}},
  };
}

}  // namespace coolsim
