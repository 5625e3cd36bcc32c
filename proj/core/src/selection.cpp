#include "coolsim/selection.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace coolsim {

void PsmParams::validate() const {
  if (s < 1) throw std::invalid_argument("psm.s must be >= 1");
  if (!(c >= 0.0)) throw std::invalid_argument("psm.c must be >= 0");
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("psm.a must lie in [0, 1]");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("psm.x must lie in [0, 1]");
  if (update_every < 1) throw std::invalid_argument("psm.update_every must be >= 1");
}

LatencyWindow::LatencyWindow(std::size_t n_providers, std::size_t s)
    : s_(s), ring_(n_providers * 2 * s, 0.0), heads_(n_providers, 0), counts_(n_providers, 0) {
  if (s == 0) throw std::invalid_argument("window size must be >= 1");
}

void LatencyWindow::push(ProviderId provider, double delta) {
  if (provider >= counts_.size()) {
    throw std::out_of_range("unknown provider id " + std::to_string(provider));
  }
  const std::size_t cap = capacity();
  auto& head = heads_[provider];
  ring_[provider * cap + head] = std::max(0.0, delta);
  head = (head + 1) % cap;
  counts_[provider] = std::min(counts_[provider] + 1, cap);
}

double LatencyWindow::sample(ProviderId provider, std::size_t k) const {
  if (k >= counts_.at(provider)) throw std::out_of_range("window slot not filled");
  const std::size_t cap = capacity();
  const std::size_t idx = (heads_[provider] + cap - 1 - k) % cap;
  return ring_[provider * cap + idx];
}

std::optional<double> LatencyWindow::current_mean(ProviderId provider) const {
  const std::size_t n = std::min(count(provider), s_);
  if (n == 0) return std::nullopt;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += sample(provider, k);
  return sum / static_cast<double>(n);
}

std::optional<double> LatencyWindow::previous_mean(ProviderId provider) const {
  const std::size_t n = count(provider);
  if (n <= s_) return std::nullopt;
  double sum = 0.0;
  for (std::size_t k = s_; k < n; ++k) sum += sample(provider, k);
  return sum / static_cast<double>(n - s_);
}

namespace {

struct ProviderStats {
  bool eligible = false;  // at least two samples
  double avg = 0.0;
  double prev = 0.0;
};

std::vector<ProviderStats> collect_stats(const LatencyWindow& windows) {
  std::vector<ProviderStats> stats(windows.n_providers());
  for (ProviderId j = 0; j < stats.size(); ++j) {
    if (windows.count(j) < 2) continue;
    stats[j].eligible = true;
    stats[j].avg = *windows.current_mean(j);
    stats[j].prev = windows.previous_mean(j).value_or(stats[j].avg);
  }
  return stats;
}

std::vector<bool> best_membership(const std::vector<ProviderStats>& stats, double c) {
  double best = 0.0;
  bool any = false;
  for (const auto& st : stats) {
    if (!st.eligible) continue;
    best = any ? std::min(best, st.avg) : st.avg;
    any = true;
  }
  std::vector<bool> in_best(stats.size(), true);
  if (!any) return in_best;
  for (std::size_t j = 0; j < stats.size(); ++j) {
    if (stats[j].eligible) in_best[j] = stats[j].avg <= best + c;
  }
  return in_best;
}

}  // namespace

std::vector<double> update_selection_ratios(std::span<const double> r_in,
                                            const LatencyWindow& windows,
                                            const PsmParams& params) {
  const std::size_t n = r_in.size();
  if (n == 0) throw std::invalid_argument("no providers");
  if (windows.n_providers() != n) throw std::invalid_argument("ratio/window size mismatch");

  const auto stats = collect_stats(windows);
  const auto in_best = best_membership(stats, params.c);

  double target = 0.0;
  std::size_t target_n = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (in_best[j] && stats[j].eligible) {
      target += stats[j].avg;
      ++target_n;
    }
  }
  if (target_n > 0) target /= static_cast<double>(target_n);

  // PD step on the best cluster.
  std::vector<double> r_norm(n, 0.0);
  double s_best = 0.0;
  std::size_t best_n = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!in_best[j]) continue;
    ++best_n;
    double e = 0.0, d = 0.0;
    if (stats[j].eligible) {
      e = target > 0.0 ? (target - stats[j].avg) / target : 0.0;
      d = stats[j].avg - stats[j].prev;
    }
    r_norm[j] = std::clamp(r_in[j] + params.k_p * e + params.k_d * d, 0.0, 1.0);
    s_best += r_norm[j];
  }

  // Attrition on the worst cluster.
  double s_worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (in_best[j]) continue;
    r_norm[j] = (1.0 - params.a) * r_in[j];
    s_worst += r_norm[j];
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (!in_best[j]) continue;
    r_norm[j] = s_best > 0.0 ? (1.0 - s_worst) * r_norm[j] / s_best
                             : (1.0 - s_worst) / static_cast<double>(best_n);
  }

  std::vector<double> r_out(n);
  const double floor = params.x / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) r_out[j] = (1.0 - params.x) * r_norm[j] + floor;
  return r_out;
}

std::vector<ProviderId> best_cluster(const LatencyWindow& windows, const PsmParams& params) {
  const auto in_best = best_membership(collect_stats(windows), params.c);
  std::vector<ProviderId> out;
  for (ProviderId j = 0; j < in_best.size(); ++j) {
    if (in_best[j]) out.push_back(j);
  }
  return out;
}

SelectionState::SelectionState(std::size_t n_providers, PsmParams params)
    : params_(params),
      ratios_(n_providers, n_providers ? 1.0 / static_cast<double>(n_providers) : 0.0),
      windows_(n_providers, params.s) {
  params_.validate();
  if (n_providers == 0) throw std::invalid_argument("selection state needs providers");
}

bool SelectionState::record_sample(ProviderId provider, double rtt, double reported_queue_wait) {
  if (provider >= ratios_.size()) {
    throw std::out_of_range("unknown provider id " + std::to_string(provider));
  }
  if (rtt < 0.0) throw std::invalid_argument("negative round-trip time");
  windows_.push(provider, std::max(0.0, rtt - reported_queue_wait));
  ++since_update_;
  return since_update_ >= params_.update_every;
}

void SelectionState::update() {
  since_update_ = 0;
  if (params_.hold_uniform_until_sampled) {
    for (ProviderId j = 0; j < ratios_.size(); ++j) {
      if (windows_.count(j) == 0) return;
    }
  }
  ratios_ = update_selection_ratios(ratios_, windows_, params_);
  ++updates_;
}

void SelectionState::set_ratios(std::vector<double> ratios) {
  if (ratios.size() != ratios_.size()) throw std::invalid_argument("ratio size mismatch");
  ratios_ = std::move(ratios);
}

ProviderId select_provider(std::span<const double> ratios, RngStream& rng) {
  if (ratios.empty()) throw std::invalid_argument("no providers to select from");
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    if (ratios[j] <= 0.0) continue;
    last_positive = j;
    cum += ratios[j];
    if (u < cum) return static_cast<ProviderId>(j);
  }
  return static_cast<ProviderId>(last_positive);
}

std::vector<ProviderId> select_multi_weighted(std::span<const double> ratios, std::size_t k,
                                              RngStream& rng) {
  const std::size_t n = ratios.size();
  if (k < 1 || k > n) throw std::out_of_range("k must lie in [1, N_P]");
  std::vector<ProviderId> out;
  if (k == n) {
    out.resize(n);
    std::iota(out.begin(), out.end(), ProviderId{0});
    return out;
  }
  std::vector<double> w(ratios.begin(), ratios.end());
  std::vector<bool> taken(n, false);
  for (std::size_t draw = 0; draw < k; ++draw) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!taken[j]) total += std::max(0.0, w[j]);
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double cum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (taken[j] || w[j] <= 0.0) continue;
        cum += w[j];
        pick = j;
        if (u < cum) break;
      }
    } else {
      std::size_t idx = rng.uniform_index(n - draw);
      for (std::size_t j = 0; j < n; ++j) {
        if (taken[j]) continue;
        if (idx-- == 0) {
          pick = j;
          break;
        }
      }
    }
    taken[pick] = true;
    out.push_back(static_cast<ProviderId>(pick));
  }
  return out;
}

std::vector<ProviderId> select_multi_uniform(std::size_t n_providers, std::size_t k, RngStream& rng) {
  if (k < 1 || k > n_providers) throw std::out_of_range("k must lie in [1, N_P]");
  std::vector<ProviderId> ids(n_providers);
  std::iota(ids.begin(), ids.end(), ProviderId{0});
  if (k == n_providers) return ids;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(n_providers - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k);
  return ids;
}

ProviderId select_pot(std::pair<ProviderId, ProviderId> pair,
                      std::pair<std::size_t, std::size_t> reported_lengths, RngStream& rng) {
  if (reported_lengths.first < reported_lengths.second) return pair.first;
  if (reported_lengths.second < reported_lengths.first) return pair.second;
  return rng.uniform() < 0.5 ? pair.first : pair.second;
}

std::pair<ProviderId, ProviderId> spot_candidates(std::span<const double> latency_estimates,
                                                  RngStream& rng) {
  const std::size_t n = latency_estimates.size();
  if (n == 0) throw std::invalid_argument("no providers to select from");
  if (n == 1) return {0, 0};
  std::vector<ProviderId> ids(n);
  std::iota(ids.begin(), ids.end(), ProviderId{0});
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(ids[i], ids[rng.uniform_index(i + 1)]);
  }
  std::stable_sort(ids.begin(), ids.end(), [&](ProviderId l, ProviderId r) {
    return latency_estimates[l] < latency_estimates[r];
  });
  return {ids[0], ids[1]};
}

ProviderId select_spot(std::span<const double> latency_estimates,
                       const std::function<std::size_t(ProviderId)>& reported_length,
                       RngStream& rng) {
  const auto pair = spot_candidates(latency_estimates, rng);
  if (pair.first == pair.second) return pair.first;
  return select_pot(pair, {reported_length(pair.first), reported_length(pair.second)}, rng);
}

}  // namespace coolsim
