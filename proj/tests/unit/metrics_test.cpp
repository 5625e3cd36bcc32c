#include "coolsim/metrics.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "coolsim/artifacts.hpp"

namespace coolsim {
namespace {

TEST(Ledger, EarliestReportWins) {
  DiscoveryLedger l({false, true, false});
  l.register_asset(0, 1.0);
  l.record_discovery(0, 2, 50.0);
  l.record_discovery(0, 1, 40.0);
  l.record_discovery(0, 0, 45.0);
  EXPECT_EQ(l.first(0).consumer, 1u);
  EXPECT_EQ(l.first(0).t_first, 40.0);
}

TEST(Ledger, ExactTieGoesToLowerId) {
  DiscoveryLedger l({false, true, false});
  l.register_asset(0, 1.0);
  l.record_discovery(0, 2, 40.0);
  l.record_discovery(0, 1, 40.0);
  EXPECT_EQ(l.first(0).consumer, 1u);
  l.record_discovery(0, 0, 40.0);
  EXPECT_EQ(l.first(0).consumer, 0u);
}

TEST(Ledger, HorizonIsIdempotent) {
  DiscoveryLedger l({false, true});
  for (AssetId a = 0; a < 5; ++a) l.register_asset(a, 10.0 * static_cast<double>(a + 1));
  EXPECT_EQ(l.record_horizon(0, 30.0, 100.0), 3u);
  EXPECT_EQ(l.record_horizon(0, 30.0, 110.0), 0u);
  EXPECT_EQ(l.record_horizon(0, 25.0, 120.0), 0u);
  EXPECT_EQ(l.seen_by(0), 3u);
  EXPECT_EQ(l.first(0).t_first, 100.0);
  EXPECT_EQ(l.record_horizon(0, 50.0, 130.0), 2u);
  EXPECT_FALSE(l.first(0).discovered && l.first(0).consumer != 0u);
}

TEST(Ledger, RegistrationOrderEnforced) {
  DiscoveryLedger l({false});
  l.register_asset(0, 5.0);
  EXPECT_THROW(l.register_asset(0, 6.0), std::logic_error);
  EXPECT_THROW(l.register_asset(1, 4.0), std::logic_error);
  EXPECT_THROW(l.record_discovery(3, 0, 1.0), std::out_of_range);
}

TEST(Share, TwoConsumerMicroTrace) {
  // Honest consumer 0 and malicious consumer 1 alternate first sightings.
  DiscoveryLedger l({false, true});
  for (AssetId a = 0; a < 4; ++a) l.register_asset(a, 10.0 * static_cast<double>(a));
  l.record_horizon(1, 0.0, 1.0);
  l.record_horizon(0, 10.0, 2.0);
  l.record_horizon(1, 20.0, 3.0);
  l.record_horizon(0, 30.0, 4.0);
  const auto c = discovery_counts(l);
  EXPECT_EQ(c.discovered_assets, 4u);
  EXPECT_EQ(c.malicious_first, 2u);
  EXPECT_DOUBLE_EQ(*malicious_dnbsa_share(l), 0.5);
}

TEST(Share, AllHonestIsZeroAndEmptyIsUndefined) {
  DiscoveryLedger l({false, false});
  EXPECT_FALSE(malicious_dnbsa_share(l));
  l.register_asset(0, 1.0);
  EXPECT_FALSE(malicious_dnbsa_share(l));
  l.record_horizon(1, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(*malicious_dnbsa_share(l), 0.0);
}

TEST(Share, WindowExcludesEarlyAssets) {
  DiscoveryLedger l({false, true});
  l.register_asset(0, 5.0);
  l.register_asset(1, 15.0);
  l.record_horizon(1, 5.0, 6.0);
  l.record_horizon(0, 15.0, 16.0);
  const auto c = discovery_counts(l, 10.0);
  EXPECT_EQ(c.total_assets, 1u);
  EXPECT_EQ(c.malicious_first, 0u);
  EXPECT_DOUBLE_EQ(*malicious_dnbsa_share(l, 10.0), 0.0);
}

TEST(Exodus, Thresholds) {
  const auto t = exodus_thresholds(0.75, 0.5);
  EXPECT_DOUBLE_EQ(t.delay, 0.625);
  EXPECT_DOUBLE_EQ(t.cuckoo_d, 0.25);
  EXPECT_DOUBLE_EQ(t.cuckoo_c_satur, 0.5);
  const auto h = exodus_thresholds(0.5, 0.5);
  EXPECT_DOUBLE_EQ(h.cuckoo_d, 0.5);
  EXPECT_DOUBLE_EQ(exodus_thresholds(1.0, 0.5).cuckoo_d, 0.0);
  EXPECT_THROW(exodus_thresholds(1.2, 0.5), std::invalid_argument);
}

TEST(Percentiles, LinearInterpolation) {
  const auto p = percentiles({4.0, 1.0, 3.0, 2.0, 5.0});
  EXPECT_EQ(p.count, 5u);
  EXPECT_DOUBLE_EQ(p.mean, 3.0);
  EXPECT_DOUBLE_EQ(p.p50, 3.0);
  EXPECT_DOUBLE_EQ(p.p90, 4.6);
  EXPECT_NEAR(p.p99, 4.96, 1e-12);
  EXPECT_EQ(percentiles({}).count, 0u);
  EXPECT_DOUBLE_EQ(percentiles({7.0}).p99, 7.0);
}

RequestRecord done(RequestId id, ConsumerId c, ProviderId p, SimTime gen, SimTime recv) {
  RequestRecord r;
  r.id = id;
  r.group = id;
  r.consumer = c;
  r.provider = p;
  r.t_gen = gen;
  r.t_send = gen;
  r.t_arrive = gen + 2.0;
  r.t_tee_enter = r.t_arrive;
  r.t_serv = r.t_arrive + 1.0;
  r.t_recv = recv;
  r.asset_horizon = r.t_serv;
  return r;
}

TEST(Summary, LatencyAndThroughput) {
  std::vector<RequestRecord> recs = {done(0, 0, 0, 0.0, 20.0), done(1, 0, 1, 10.0, 30.0),
                                     done(2, 1, 1, 5.0, 45.0), RequestRecord{}};
  recs.back().id = 3;
  const auto s = latency_throughput_summary(recs, {false, true}, 2);
  EXPECT_EQ(s.requests_completed, 3u);
  EXPECT_DOUBLE_EQ(s.honest_latency.p50, 20.0);
  EXPECT_DOUBLE_EQ(s.malicious_latency.mean, 40.0);
  EXPECT_EQ(s.served_per_provider, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_DOUBLE_EQ(s.mean_in_tee_wait_ms, 1.0);
  EXPECT_DOUBLE_EQ(s.freshness.mean, (17.0 + 17.0 + 37.0) / 3.0);
}

TEST(Flags, StringRoundTrip) {
  for (unsigned f = 0; f < 32; ++f) {
    const auto flags = static_cast<std::uint8_t>(f);
    EXPECT_EQ(attack_flags_from_string(attack_flags_to_string(flags)), flags);
  }
  EXPECT_EQ(attack_flags_to_string(kFlagDelayed | kFlagCuckoo), "delay|cuckoo");
  EXPECT_EQ(attack_flags_to_string(kFlagNone), "-");
  EXPECT_THROW(attack_flags_from_string("slow"), std::invalid_argument);
}

TEST(Artifacts, FormatDoubleRoundTrips) {
  for (double v : {0.0, 0.1, 6.25, 1.0 / 3.0, 123456.789, 1e-9}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Artifacts, TraceAndDiscoveryRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "coolsim_metrics_test";
  std::filesystem::create_directories(dir);
  std::vector<RequestRecord> recs = {done(0, 0, 0, 0.0, 20.5), done(1, 1, 1, 1.0 / 3.0, 30.0)};
  recs[1].flags = kFlagDelayed | kFlagCuckoo;
  recs[1].reported_wait_ms = 12.5;
  std::ostringstream trace;
  write_trace_csv(trace, recs);
  EXPECT_EQ(trace.str().substr(0, trace.str().find('\n')), kTraceHeader);
  write_text_file(dir / "trace.csv", trace.str());
  const auto back = read_trace_csv(dir / "trace.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].t_gen, recs[1].t_gen);
  EXPECT_EQ(back[1].flags, recs[1].flags);
  EXPECT_EQ(back[1].reported_wait_ms, 12.5);
  EXPECT_EQ(back[0].t_recv, 20.5);

  DiscoveryLedger l({false, true});
  l.register_asset(0, 1.0);
  l.register_asset(1, 2.0);
  l.register_asset(2, 3.0);
  l.record_horizon(1, 2.0, 5.0);
  std::ostringstream disc;
  write_discovery_csv(disc, l);
  write_text_file(dir / "discovery.csv", disc.str());
  const auto rows = read_discovery_csv(dir / "discovery.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].malicious);
  EXPECT_EQ(rows[1].t_first, 5.0);
  std::filesystem::remove_all(dir);
}

TEST(Artifacts, SummaryJsonRoundTrip) {
  RunSummary s;
  s.malicious_dnbsa_share = 0.25;
  s.shares = {10, 8, 2};
  s.honest_latency = percentiles({1.0, 2.0, 3.0});
  s.served_per_provider = {3, 4};
  s.config_fingerprint = "abc";
  s.seed = 7;
  const auto back = summary_from_json(summary_to_json(s));
  EXPECT_EQ(back.malicious_dnbsa_share, s.malicious_dnbsa_share);
  EXPECT_EQ(back.shares.discovered_assets, 8u);
  EXPECT_EQ(back.honest_latency.p50, 2.0);
  EXPECT_EQ(back.served_per_provider, s.served_per_provider);
  EXPECT_EQ(back.config_fingerprint, "abc");
  EXPECT_EQ(summary_to_json(back), summary_to_json(s));
}

}  // namespace
}  // namespace coolsim
