#include "coolsim/provider.hpp"

#include <gtest/gtest.h>

#include "coolsim/rng.hpp"

namespace coolsim {
namespace {

constexpr double kD = 6.25;

Provider make(ProviderBehavior b = {}) { return Provider(0, b, kD, rng_stream("provider-0", 1)); }

ProviderBehavior malicious(bool delay, bool content, bool queue, bool tt) {
  ProviderBehavior b;
  b.honest = false;
  b.delay_attack = delay;
  b.content_attack = content;
  b.queue_attack = queue;
  b.trusted_time = tt;
  return b;
}

// Serves everything queued at `now`, returning the responses in order.
std::vector<SearchResponse> drain(Provider& p, SimTime now, bool requester_honest = true) {
  std::vector<SearchResponse> out;
  while (auto s = p.start_service(now)) {
    now = s->t_end;
    out.push_back(p.complete_service(s->request, requester_honest, now));
    p.finish_service(now);
  }
  return out;
}

TEST(Provider, IdleStartsImmediately) {
  Provider p = make();
  EXPECT_TRUE(p.enqueue(1, 10.0));
  const auto s = p.start_service(10.0);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->t_serv, 10.0);
  EXPECT_EQ(s->t_end, 16.25);
  EXPECT_TRUE(p.busy());
  EXPECT_EQ(p.busy_until(), 16.25);
}

TEST(Provider, FifoWaitBehindTwo) {
  Provider p = make();
  EXPECT_TRUE(p.enqueue(1, 0.0));
  EXPECT_TRUE(p.enqueue(2, 0.0));  // server still idle until start_service runs
  auto s = p.start_service(0.0);
  EXPECT_FALSE(p.enqueue(3, 0.0));
  const auto rsps = [&] {
    std::vector<SearchResponse> out;
    SimTime now = s->t_end;
    out.push_back(p.complete_service(s->request, true, now));
    p.finish_service(now);
    auto more = drain(p, now);
    out.insert(out.end(), more.begin(), more.end());
    return out;
  }();
  ASSERT_EQ(rsps.size(), 3u);
  EXPECT_EQ(rsps[0].request_id, 1u);
  EXPECT_EQ(rsps[2].request_id, 3u);
  EXPECT_EQ(rsps[2].asset_horizon, 12.5);
  EXPECT_EQ(rsps[2].reported_queue_wait, 12.5);
  EXPECT_EQ(p.served_count(), 3u);
}

TEST(Provider, HonestReportsTrueWait) {
  Provider p = make();
  for (RequestId r = 0; r < 3; ++r) p.enqueue(r, 0.0);
  const auto rsps = drain(p, 0.0);
  EXPECT_EQ(rsps[2].reported_queue_wait, 12.5);
}

TEST(Provider, TrustedTimeCannotBeFaked) {
  Provider p = make(malicious(true, false, false, true));
  for (RequestId r = 0; r < 3; ++r) p.enqueue(r, 0.0);
  const auto rsps = drain(p, 0.0);
  EXPECT_EQ(rsps[2].reported_queue_wait, 12.5);
}

TEST(Provider, WithoutTrustedTimeWaitIsFabricated) {
  Provider p = make(malicious(true, false, false, false));
  for (RequestId r = 0; r < 3; ++r) p.enqueue(r, 0.0);
  auto rsps = drain(p, 0.0);
  EXPECT_EQ(rsps[2].reported_queue_wait, 62.5);
  EXPECT_TRUE(rsps[2].flags & kFlagFabricatedWait);

  Provider q = make(malicious(true, false, false, false));
  for (RequestId r = 0; r < 3; ++r) q.enqueue(r, 0.0);
  rsps = drain(q, 0.0, /*requester_honest=*/false);
  EXPECT_EQ(rsps[2].reported_queue_wait, 12.5);
}

TEST(Provider, ClockErrorIsClampedAndCentered) {
  ProviderBehavior b;
  b.trusted_time = true;
  b.clock_error_sigma_ms = 0.3;
  Provider p = make(b);
  double sum = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    p.enqueue(static_cast<RequestId>(2 * i), 100.0 * i);
    p.enqueue(static_cast<RequestId>(2 * i + 1), 100.0 * i);
    const auto rsps = drain(p, 100.0 * i);
    EXPECT_GE(rsps[0].reported_queue_wait, 0.0);
    sum += rsps[1].reported_queue_wait;
  }
  EXPECT_NEAR(sum / n, kD, 0.02);
}

TEST(Provider, DelayEgress) {
  Provider p = make(malicious(true, false, false, false));
  SearchResponse r;
  r.asset_horizon = 10.0;
  auto out = p.apply_egress_policy(r, true, 16.25);
  EXPECT_EQ(out.t_depart, 66.25);
  EXPECT_EQ(out.asset_horizon, 10.0);
  out = p.apply_egress_policy(r, false, 16.25);
  EXPECT_EQ(out.t_depart, 16.25);
  EXPECT_EQ(out.asset_horizon, 10.0);
}

TEST(Provider, ContentEgress) {
  Provider p = make(malicious(false, true, false, false));
  SearchResponse r;
  r.asset_horizon = 10.0;
  auto out = p.apply_egress_policy(r, true, 16.25);
  EXPECT_EQ(out.t_depart, 16.25);
  EXPECT_EQ(out.asset_horizon, 0.0);
  out = p.apply_egress_policy(r, false, 16.25);
  EXPECT_EQ(out.asset_horizon, 10.0);
}

TEST(Provider, HonestEgressUntouched) {
  Provider p = make();
  SearchResponse r;
  r.asset_horizon = 3.0;
  const auto out = p.apply_egress_policy(r, true, 9.0);
  EXPECT_EQ(out.t_depart, 9.0);
  EXPECT_EQ(out.asset_horizon, 3.0);
  EXPECT_EQ(out.flags, 0u);
}

TEST(Provider, ReportedQueueLength) {
  Provider honest = make();
  EXPECT_EQ(honest.report_queue_length(), 0u);
  for (RequestId r = 0; r < 4; ++r) honest.enqueue(r, 0.0);
  EXPECT_EQ(honest.report_queue_length(), 4u);

  Provider attacker = make(malicious(true, false, true, false));
  for (RequestId r = 0; r < 5; ++r) attacker.enqueue(r, 0.0);
  EXPECT_EQ(attacker.tee_queue_length(), 1u);
  EXPECT_EQ(attacker.external_queue_length(), 4u);
  EXPECT_EQ(attacker.report_queue_length(), 1u);
}

TEST(Provider, QueueAttackHidesWaitAndKeepsFifo) {
  Provider p = make(malicious(true, false, true, true));
  for (RequestId r = 0; r < 5; ++r) p.enqueue(r, 0.0);
  SimTime now = 0.0;
  std::vector<RequestId> order;
  while (auto s = p.start_service(now)) {
    EXPECT_LE(p.tee_queue_length(), 1u);
    now = s->t_end;
    const auto rsp = p.complete_service(s->request, true, now);
    EXPECT_EQ(rsp.reported_queue_wait, 0.0);
    EXPECT_TRUE(rsp.flags & kFlagExternalQueue);
    order.push_back(rsp.request_id);
    p.finish_service(now);
  }
  EXPECT_EQ(order, (std::vector<RequestId>{0, 1, 2, 3, 4}));
  EXPECT_EQ(now, 5 * kD);
}

TEST(Provider, WorkConservingThroughputCap) {
  Provider p = make();
  RngStream rng = rng_stream("arrivals", 3);
  SimTime t = 0.0;
  for (RequestId r = 0; r < 200; ++r) p.enqueue(r, t += rng.exponential(4.0));
  SimTime now = 0.0;
  SimTime first = -1.0;
  while (auto s = p.start_service(std::max(now, 0.0))) {
    if (first < 0) first = s->t_serv;
    now = s->t_end;
    p.complete_service(s->request, true, now);
    p.finish_service(now);
  }
  // Every request was queued before the first start, so the server never idles.
  EXPECT_EQ(p.served_count(), 200u);
  EXPECT_DOUBLE_EQ(now - first, 200 * kD);
}

TEST(Provider, BehaviorValidation) {
  ProviderBehavior b;
  b.delay_attack = true;
  EXPECT_THROW(b.validate(), std::invalid_argument);
  b.honest = false;
  b.content_attack = true;
  EXPECT_THROW(b.validate(), std::invalid_argument);
  EXPECT_THROW(Provider(0, {}, 0.0, rng_stream("p", 1)), std::invalid_argument);
}

TEST(Provider, CompleteWithoutServiceThrows) {
  Provider p = make();
  EXPECT_THROW(p.complete_service(0, true, 1.0), std::logic_error);
  EXPECT_THROW(p.finish_service(1.0), std::logic_error);
}

}  // namespace
}  // namespace coolsim
