#include "coolsim/selection.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "coolsim/rng.hpp"

namespace coolsim {
namespace {

constexpr double kExact = 1e-9;

LatencyWindow filled(std::size_t s, const std::vector<double>& current, const std::vector<double>& previous) {
  LatencyWindow w(current.size(), s);
  for (ProviderId p = 0; p < current.size(); ++p) {
    for (std::size_t k = 0; k < s; ++k) w.push(p, previous[p]);
    for (std::size_t k = 0; k < s; ++k) w.push(p, current[p]);
  }
  return w;
}

PsmParams hand_params() {
  PsmParams p;
  p.s = 2;
  p.c = 10.0;
  p.k_p = 0.5;
  p.k_d = 0.0;
  p.a = 0.2;
  p.x = 0.1;
  return p;
}

TEST(LatencyWindow, NewestFirstAndMeans) {
  LatencyWindow w(1, 2);
  EXPECT_FALSE(w.current_mean(0));
  for (double v : {1.0, 2.0, 3.0, 4.0, 5.0}) w.push(0, v);
  EXPECT_EQ(w.count(0), 4u);
  EXPECT_EQ(w.sample(0, 0), 5.0);
  EXPECT_EQ(w.sample(0, 3), 2.0);
  EXPECT_DOUBLE_EQ(*w.current_mean(0), 4.5);
  EXPECT_DOUBLE_EQ(*w.previous_mean(0), 2.5);
  EXPECT_THROW(w.push(1, 1.0), std::out_of_range);
}

TEST(LatencyWindow, PreviousMeanNeedsMoreThanS) {
  LatencyWindow w(1, 3);
  for (double v : {1.0, 2.0, 3.0}) w.push(0, v);
  EXPECT_FALSE(w.previous_mean(0));
  w.push(0, 4.0);
  EXPECT_DOUBLE_EQ(*w.previous_mean(0), 1.0);
}

TEST(SelectionState, SampleIsRttMinusReportedWait) {
  SelectionState st(2, PsmParams{});
  st.record_sample(0, 20.0, 12.5);
  EXPECT_EQ(st.windows().sample(0, 0), 7.5);
  st.record_sample(1, 20.0, 62.5);
  EXPECT_EQ(st.windows().sample(1, 0), 0.0);
  EXPECT_THROW(st.record_sample(2, 1.0, 0.0), std::out_of_range);
  EXPECT_THROW(st.record_sample(0, -1.0, 0.0), std::invalid_argument);
}

TEST(SelectionState, UpdateDueEveryN) {
  PsmParams p;
  p.update_every = 3;
  SelectionState st(2, p);
  EXPECT_FALSE(st.record_sample(0, 1.0, 0.0));
  EXPECT_FALSE(st.record_sample(1, 1.0, 0.0));
  EXPECT_TRUE(st.record_sample(0, 1.0, 0.0));
  st.update();
  EXPECT_EQ(st.responses_since_update(), 0u);
  EXPECT_EQ(st.updates(), 1u);
}

TEST(SelectionState, HoldUniformUntilSampled) {
  PsmParams p;
  p.hold_uniform_until_sampled = true;
  SelectionState st(3, p);
  for (int i = 0; i < 10; ++i) st.record_sample(0, 1.0, 0.0);
  for (int i = 0; i < 10; ++i) st.record_sample(1, 100.0, 0.0);
  st.update();
  for (double r : st.ratios()) EXPECT_NEAR(r, 1.0 / 3.0, kExact);
  EXPECT_EQ(st.updates(), 0u);
}

TEST(Update, WorstClusterHandStep) {
  const std::vector<double> r_in = {0.5, 0.5};
  const auto w = filled(2, {10, 30}, {10, 30});
  const auto p = hand_params();
  EXPECT_EQ(best_cluster(w, p), (std::vector<ProviderId>{0}));
  const auto out = update_selection_ratios(r_in, w, p);
  EXPECT_NEAR(out[0], 0.59, kExact);
  EXPECT_NEAR(out[1], 0.41, kExact);
}

TEST(Update, BestClusterHandStep) {
  const std::vector<double> r_in = {0.5, 0.5};
  const auto w = filled(2, {10, 15}, {10, 15});
  const auto p = hand_params();
  EXPECT_EQ(best_cluster(w, p), (std::vector<ProviderId>{0, 1}));
  // target 12.5, e = +0.2 / -0.2, r_tmp = 0.6 / 0.4, no worst mass,
  // mix 0.9 * r + 0.05.
  const auto out = update_selection_ratios(r_in, w, p);
  EXPECT_NEAR(out[0], 0.59, kExact);
  EXPECT_NEAR(out[1], 0.41, kExact);
}

TEST(Update, DerivativeTermUsesPreviousWindow) {
  auto p = hand_params();
  p.k_p = 0.0;
  p.k_d = -0.01;
  // Provider 0 got 5 ms worse, provider 1 unchanged; both in B.
  const auto w = filled(2, {12, 14}, {7, 14});
  const auto out = update_selection_ratios(std::vector<double>{0.5, 0.5}, w, p);
  // r_tmp = {0.45, 0.5}, renormalized to {0.45/0.95, 0.5/0.95}, then mixed.
  EXPECT_NEAR(out[0], 0.9 * 0.45 / 0.95 + 0.05, kExact);
  EXPECT_NEAR(out[1], 0.9 * 0.5 / 0.95 + 0.05, kExact);
}

TEST(Update, UniformFixedPoint) {
  const std::size_t n = 8;
  const std::vector<double> r(n, 1.0 / n);
  const PsmParams p;
  const auto out = update_selection_ratios(r, filled(p.s, std::vector<double>(n, 9.0), std::vector<double>(n, 9.0)), p);
  for (double v : out) EXPECT_NEAR(v, 1.0 / n, kExact);
}

TEST(Update, UnsampledProvidersJoinBestWithoutError) {
  const PsmParams p;
  LatencyWindow w(3, p.s);
  for (int i = 0; i < 10; ++i) {
    w.push(0, 5.0);
    w.push(1, 80.0);
  }
  w.push(2, 500.0);  // a single sample does not count yet
  const auto best = best_cluster(w, p);
  EXPECT_EQ(best, (std::vector<ProviderId>{0, 2}));
  const auto out = update_selection_ratios(std::vector<double>(3, 1.0 / 3), w, p);
  EXPECT_LT(out[1], 1.0 / 3);
  EXPECT_NEAR(out[0], out[2], kExact);
}

struct RandomCase {
  std::vector<double> r;
  LatencyWindow w;
};

RandomCase random_case(RngStream& rng, const PsmParams& p) {
  const std::size_t n = 2 + rng.uniform_index(14);
  std::vector<double> r(n);
  for (auto& v : r) v = rng.uniform() + 1e-3;
  const double sum = std::accumulate(r.begin(), r.end(), 0.0);
  for (auto& v : r) v /= sum;
  LatencyWindow w(n, p.s);
  for (ProviderId j = 0; j < n; ++j) {
    const std::size_t k = rng.uniform_index(2 * p.s + 1);
    const double base = rng.uniform() * 80.0;
    for (std::size_t i = 0; i < k; ++i) w.push(j, base + rng.uniform() * 10.0);
  }
  return {r, w};
}

TEST(UpdateProperties, SimplexAndFloor) {
  RngStream rng = rng_stream("selection-properties", 1);
  for (int trial = 0; trial < 5000; ++trial) {
    PsmParams p;
    p.s = 1 + rng.uniform_index(20);
    p.a = rng.uniform();
    p.x = rng.uniform() * 0.5;
    p.c = rng.uniform() * 20.0;
    p.k_p = rng.uniform() * 2.0;
    p.k_d = -rng.uniform() * 0.1;
    const auto c = random_case(rng, p);
    const auto out = update_selection_ratios(c.r, c.w, p);
    ASSERT_NEAR(std::accumulate(out.begin(), out.end(), 0.0), 1.0, kExact) << "trial " << trial;
    const double floor = p.x / static_cast<double>(out.size());
    for (double v : out) ASSERT_GE(v, floor - kExact) << "trial " << trial;
  }
}

TEST(UpdateProperties, WorstClusterLosesMass) {
  RngStream rng = rng_stream("selection-properties", 2);
  PsmParams p;
  p.k_d = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(8);
    std::vector<double> lat(n);
    for (auto& v : lat) v = rng.uniform() * 60.0;
    const auto w = filled(p.s, lat, lat);
    const std::vector<double> r(n, 1.0 / n);
    const auto best = best_cluster(w, p);
    const auto out = update_selection_ratios(r, w, p);
    for (ProviderId j = 0; j < n; ++j) {
      if (std::find(best.begin(), best.end(), j) == best.end()) ASSERT_LT(out[j], r[j]);
    }
  }
}

TEST(UpdateProperties, ClusteringIgnoresConstantShift) {
  RngStream rng = rng_stream("selection-properties", 3);
  const PsmParams p;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(10);
    std::vector<double> lat(n), shifted(n);
    const double shift = rng.uniform() * 100.0;
    for (std::size_t j = 0; j < n; ++j) {
      lat[j] = rng.uniform() * 40.0;
      shifted[j] = lat[j] + shift;
    }
    ASSERT_EQ(best_cluster(filled(p.s, lat, lat), p), best_cluster(filled(p.s, shifted, shifted), p));
  }
}

TEST(UpdateProperties, SlowProviderSettlesAtAttritionFixedPoint) {
  const PsmParams p;
  SelectionState st(2, p);
  for (int u = 0; u < 500; ++u) {
    for (std::size_t i = 0; i < p.s; ++i) {
      st.record_sample(0, 10.0, 0.0);
      st.record_sample(1, 60.0, 0.0);
    }
    st.update();
  }
  // r = (1-x)(1-a) r + x/2 has the fixed point (x/2) / (x + a - x a).
  const double fixed = (p.x / 2.0) / (p.x + p.a - p.x * p.a);
  EXPECT_NEAR(st.ratios()[1], fixed, 1e-9);
  EXPECT_NEAR(st.ratios()[1], p.x / 2.0, 0.02);
}

TEST(Sampling, DegenerateRatios) {
  RngStream rng = rng_stream("sampling", 1);
  const std::vector<double> r = {1.0, 0.0, 0.0};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(select_provider(r, rng), 0u);
}

TEST(Sampling, CategoricalWithinThreeSigma) {
  RngStream rng = rng_stream("sampling", 2);
  const std::vector<double> r = {0.59, 0.41};
  const int n = 100000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += select_provider(r, rng) == 0;
  EXPECT_NEAR(zeros, 0.59 * n, 3.0 * std::sqrt(0.59 * 0.41 * n));
}

TEST(Sampling, UniformOverEight) {
  RngStream rng = rng_stream("sampling", 3);
  const std::vector<double> r(8, 0.125);
  std::vector<int> counts(8, 0);
  const int n = 80000;
  for (int i = 0; i < n; ++i) ++counts[select_provider(r, rng)];
  for (int c : counts) EXPECT_NEAR(c, n / 8, 3.0 * std::sqrt(0.125 * 0.875 * n));
}

TEST(Sampling, MultiFullSetAndDistinct) {
  RngStream rng = rng_stream("sampling", 4);
  const std::vector<double> r(8, 0.125);
  auto all = select_multi_weighted(r, 8, rng);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, (std::vector<ProviderId>{0, 1, 2, 3, 4, 5, 6, 7}));
  auto uni = select_multi_uniform(8, 8, rng);
  std::sort(uni.begin(), uni.end());
  EXPECT_EQ(uni, all);
  for (int i = 0; i < 200; ++i) {
    const auto pick = select_multi_uniform(8, 3, rng);
    EXPECT_EQ(std::set<ProviderId>(pick.begin(), pick.end()).size(), 3u);
  }
  EXPECT_THROW(select_multi_weighted(r, 0, rng), std::out_of_range);
  EXPECT_THROW(select_multi_uniform(8, 9, rng), std::out_of_range);
}

TEST(Sampling, WeightedPairInclusionMatchesEnumeration) {
  const std::vector<double> r = {0.6, 0.3, 0.1};
  // Sum over ordered pairs (i, j) of r_i * r_j / (1 - r_i) where 0 is in the pair.
  double expected = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j && (i == 0 || j == 0)) expected += r[i] * r[j] / (1.0 - r[i]);
  EXPECT_NEAR(expected, 0.9238095238, 1e-9);

  RngStream rng = rng_stream("sampling", 5);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const auto pick = select_multi_weighted(r, 2, rng);
    hits += std::find(pick.begin(), pick.end(), 0u) != pick.end();
  }
  EXPECT_NEAR(hits, expected * n, 3.0 * std::sqrt(expected * (1 - expected) * n));
}

TEST(Sampling, SingleWeightedDrawMatchesCategorical) {
  const std::vector<double> r = {0.2, 0.5, 0.3};
  RngStream a = rng_stream("sampling", 6);
  RngStream b = rng_stream("sampling", 6);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(select_multi_weighted(r, 1, a)[0], select_provider(r, b));
}

TEST(PowerOfTwo, ShorterQueueWins) {
  RngStream rng = rng_stream("pot", 1);
  EXPECT_EQ(select_pot({4, 7}, {3, 1}, rng), 7u);
  EXPECT_EQ(select_pot({4, 7}, {1, 4}, rng), 4u);
  int first = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) first += select_pot({4, 7}, {0, 0}, rng) == 4u;
  EXPECT_NEAR(first, n / 2, 3.0 * std::sqrt(0.25 * n));
}

TEST(Spot, CandidatesAreTheTwoNearest) {
  RngStream rng = rng_stream("spot", 1);
  const auto c = spot_candidates(std::vector<double>{9.0, 5.0, 7.0}, rng);
  EXPECT_EQ(std::set<ProviderId>({c.first, c.second}), (std::set<ProviderId>{1, 2}));
}

TEST(Spot, ZeroReportsAttractBothCandidates) {
  RngStream rng = rng_stream("spot", 2);
  const std::vector<double> est = {10, 10, 10, 10, 10, 10, 0, 0};
  for (int i = 0; i < 100; ++i) {
    const auto c = spot_candidates(est, rng);
    EXPECT_EQ(std::set<ProviderId>({c.first, c.second}), (std::set<ProviderId>{6, 7}));
  }
}

TEST(Spot, EqualEstimatesActLikeRandomSelection) {
  RngStream rng = rng_stream("spot", 3);
  const std::vector<double> est(8, 1.0);
  std::vector<int> counts(8, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[select_spot(est, [](ProviderId) { return std::size_t{0}; }, rng)];
  for (int c : counts) EXPECT_NEAR(c, n / 8, 3.0 * std::sqrt(0.125 * 0.875 * n));
}

TEST(Params, Validation) {
  PsmParams p;
  EXPECT_NO_THROW(p.validate());
  p.x = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.s = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace coolsim
