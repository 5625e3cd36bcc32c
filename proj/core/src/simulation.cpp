#include "coolsim/simulation.hpp"

#include <string>

namespace coolsim {

namespace {

std::string entity(const char* kind, std::size_t id) {
  return std::string(kind) + "-" + std::to_string(id);
}

ProviderBehavior provider_behavior(const ScenarioConfig& cfg, bool malicious) {
  ProviderBehavior b;
  b.honest = !malicious;
  b.delta_att_ms = cfg.delta_att_ms;
  b.trusted_time = cfg.effective_trusted_time();
  b.clock_error_sigma_ms = cfg.clock_error_sigma_ms;
  b.fabrication = cfg.no_tt_fabrication;
  if (malicious) {
    switch (cfg.attack) {
      case AttackKind::kNone: break;
      case AttackKind::kContent:
      case AttackKind::kCuckooC: b.content_attack = true; break;
      case AttackKind::kDelay:
      case AttackKind::kCuckooD: b.delay_attack = true; break;
      case AttackKind::kQueueDelay:
        b.delay_attack = true;
        b.queue_attack = true;
        break;
    }
  }
  return b;
}

}  // namespace

LatencyMatrix build_topology(const ScenarioConfig& cfg, std::uint64_t seed) {
  switch (cfg.topology.kind) {
    case TopologyKind::kSameDc:
      return generate_same_dc(cfg.n_consumers, cfg.n_providers, cfg.topology.base_rtt_ms);
    case TopologyKind::kMultiDc: {
      RngStream rng = rng_stream("topology", seed);
      return generate_multi_dc(cfg.topology.regions, rng, cfg.topology.options);
    }
    case TopologyKind::kCsv:
      return load_latency_matrix(cfg.topology.csv_path, cfg.n_consumers, cfg.n_providers);
  }
  throw ConfigError("unknown topology kind");
}

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed)
    : Simulation(cfg, seed, build_topology(cfg, seed)) {}

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed, LatencyMatrix matrix)
    : cfg_(cfg), seed_(seed), matrix_(std::move(matrix)), market_rng_(rng_stream("market", seed)) {
  const auto report = validate_config(cfg_);
  if (!report.ok()) {
    std::string msg = "invalid config:";
    for (const auto& e : report.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  if (matrix_.n_consumers() != cfg_.n_consumers || matrix_.n_providers() != cfg_.n_providers) {
    throw ConfigError("latency matrix is " + std::to_string(matrix_.n_consumers()) + "x" +
                      std::to_string(matrix_.n_providers()) + ", config declares " +
                      std::to_string(cfg_.n_consumers) + "x" + std::to_string(cfg_.n_providers));
  }
  wire();
}

void Simulation::wire() {
  if (cfg_.topology.kind == TopologyKind::kMultiDc) {
    const auto layout = region_layout(cfg_.topology.regions);
    consumer_region_ = layout.consumer_region;
    provider_region_ = layout.provider_region;
  } else {
    consumer_region_.assign(cfg_.n_consumers, 0);
    provider_region_.assign(cfg_.n_providers, 0);
  }
  consumer_malicious_ = choose_malicious(consumer_region_, cfg_.malicious_consumer_count());
  provider_malicious_ = choose_malicious(provider_region_, cfg_.malicious_provider_count());

  providers_.reserve(cfg_.n_providers);
  for (std::size_t p = 0; p < cfg_.n_providers; ++p) {
    const bool mal = provider_malicious_[p];
    (mal ? malicious_ids_ : honest_ids_).push_back(static_cast<ProviderId>(p));
    providers_.emplace_back(static_cast<ProviderId>(p), provider_behavior(cfg_, mal),
                            cfg_.service_time_ms, rng_stream(entity("provider", p), seed_));
  }
  start_pending_.assign(cfg_.n_providers, 0);
  in_service_.assign(cfg_.n_providers, 0);

  const bool cuckoo_attack = cfg_.attack == AttackKind::kCuckooC || cfg_.attack == AttackKind::kCuckooD;
  const ArrivalProcess requests{
      cfg_.request_arrival,
      per_consumer_rate(cfg_.rho, cfg_.n_providers, cfg_.service_time_ms, cfg_.n_consumers)};
  ConsumerOptions opts;
  opts.use_reported_wait = cfg_.effective_trusted_time() || cfg_.no_tt_trust_reports;
  opts.cuckoo_queue_cap = cfg_.cuckoo_queue_cap;

  consumers_.reserve(cfg_.n_consumers);
  for (std::size_t c = 0; c < cfg_.n_consumers; ++c) {
    ConsumerBehavior b;
    b.honest = !consumer_malicious_[c];
    b.cuckoo = !b.honest && cuckoo_attack;
    b.policy = cfg_.policy;
    b.k = b.honest ? cfg_.k : 1;
    consumers_.emplace_back(static_cast<ConsumerId>(c), b, cfg_.n_providers, cfg_.psm, requests, opts,
                            rng_stream(entity("consumer", c) + "/arrival", seed_),
                            rng_stream(entity("consumer", c) + "/select", seed_));
    if (cfg_.policy == Policy::kSpot) {
      std::vector<double> est(cfg_.n_providers);
      for (std::size_t p = 0; p < cfg_.n_providers; ++p) {
        est[p] = provider_malicious_[p] && cfg_.spot_malicious_ping_zero ? 0.0 : matrix_.rtt(c, p);
      }
      consumers_.back().set_latency_estimates(std::move(est));
    }
  }

  market_ = std::make_unique<Market>(cfg_.n_providers, ArrivalProcess{cfg_.asset_arrival, cfg_.lambda_a});
  ledger_ = std::make_unique<DiscoveryLedger>(consumer_malicious_);

  const double expected = requests.rate_per_s * static_cast<double>(cfg_.n_consumers) *
                          cfg_.horizon_s * static_cast<double>(cfg_.k);
  records_.reserve(static_cast<std::size_t>(expected * 1.05) + 16);

  engine_.set_handler([this](const Event& ev) { dispatch(ev); });
  for (std::size_t c = 0; c < consumers_.size(); ++c) {
    engine_.schedule(consumers_[c].next_generation(0.0), EventKind::kRequestGenerated, c);
  }
  engine_.schedule(next_arrival(market_->process(), 0.0, market_rng_), EventKind::kAssetArrives, 0);
}

void Simulation::dispatch(const Event& ev) {
  switch (ev.kind) {
    case EventKind::kRequestGenerated: on_request_generated(static_cast<ConsumerId>(ev.payload)); break;
    case EventKind::kRequestArrives: on_request_arrives(ev.payload); break;
    case EventKind::kServiceStart: on_service_start(static_cast<ProviderId>(ev.payload)); break;
    case EventKind::kServiceEnd: on_service_end(static_cast<ProviderId>(ev.payload)); break;
    case EventKind::kResponseArrives: on_response_arrives(ev.payload); break;
    case EventKind::kAssetArrives: on_asset_arrives(); break;
    case EventKind::kAssetIndexed: break;
    case EventKind::kPsmUpdate: consumers_[ev.payload].update_ratios(); break;
  }
}

void Simulation::on_request_generated(ConsumerId c) {
  const SimTime now = engine_.now();
  Consumer& consumer = consumers_[c];
  bool cuckoo = false;
  const auto targets = consumer.choose_targets(*this, cuckoo);
  const RequestId group = next_group_++;
  for (ProviderId p : targets) {
    RequestRecord rec;
    rec.id = records_.size();
    rec.group = group;
    rec.consumer = c;
    rec.provider = p;
    rec.t_gen = now;
    rec.t_send = now + cfg_.delta_psm_ms;
    if (cuckoo) rec.flags |= kFlagCuckoo;
    records_.push_back(rec);
    engine_.schedule(rec.t_send + matrix_.delay(c, p), EventKind::kRequestArrives, rec.id);
  }
  engine_.schedule(consumer.next_generation(now), EventKind::kRequestGenerated, c);
}

void Simulation::kick(ProviderId p) {
  if (start_pending_[p]) return;
  start_pending_[p] = 1;
  engine_.schedule(engine_.now(), EventKind::kServiceStart, p);
}

void Simulation::on_request_arrives(RequestId r) {
  RequestRecord& rec = records_[r];
  rec.t_arrive = engine_.now();
  if (providers_[rec.provider].enqueue(r, engine_.now())) kick(rec.provider);
}

void Simulation::on_service_start(ProviderId p) {
  start_pending_[p] = 0;
  const auto started = providers_[p].start_service(engine_.now());
  if (!started) return;
  RequestRecord& rec = records_[started->request];
  rec.t_tee_enter = started->t_tee_enter;
  rec.t_serv = started->t_serv;
  in_service_[p] = started->request;
  engine_.schedule(started->t_end, EventKind::kServiceEnd, p);
}

void Simulation::on_service_end(ProviderId p) {
  const SimTime now = engine_.now();
  Provider& provider = providers_[p];
  RequestRecord& rec = records_[in_service_[p]];
  const bool requester_honest = !consumer_malicious_[rec.consumer];
  SearchResponse rsp = provider.complete_service(rec.id, requester_honest, now);
  rsp = provider.apply_egress_policy(rsp, requester_honest, now);
  rec.reported_wait_ms = rsp.reported_queue_wait;
  rec.asset_horizon = rsp.asset_horizon;
  rec.flags |= rsp.flags;
  engine_.schedule(rsp.t_depart + matrix_.delay(rec.consumer, p), EventKind::kResponseArrives, rec.id);
  if (provider.finish_service(now)) kick(p);
}

void Simulation::on_response_arrives(RequestId r) {
  const SimTime now = engine_.now();
  RequestRecord& rec = records_[r];
  rec.t_recv = now;
  Consumer& consumer = consumers_[rec.consumer];
  if (consumer.on_response(rec.provider, now - rec.t_send, rec.reported_wait_ms, rec.asset_horizon,
                           now, *ledger_)) {
    engine_.schedule(now, EventKind::kPsmUpdate, rec.consumer);
  }
}

void Simulation::on_asset_arrives() {
  const SimTime now = engine_.now();
  const Asset asset = market_->create_asset(now);
  for (const IndexEvent& ie : market_->broadcast(asset, now, *ledger_)) {
    providers_[ie.provider].on_asset_indexed(ie.asset, ie.t_index);
  }
  engine_.schedule(next_arrival(market_->process(), now, market_rng_), EventKind::kAssetArrives, 0);
}

RunResult Simulation::run() {
  RunResult out;
  out.seed = seed_;
  out.stats = engine_.run_until(cfg_.horizon_s * 1000.0);
  const ShareCounts counts = discovery_counts(*ledger_, cfg_.warmup_s * 1000.0);
  out.summary = latency_throughput_summary(records_, consumer_malicious_, providers_.size());
  out.summary.shares = counts;
  out.summary.malicious_dnbsa_share = malicious_dnbsa_share(counts);
  out.summary.config_fingerprint = config_fingerprint(cfg_);
  out.summary.seed = seed_;
  out.records = std::move(records_);
  out.ledger = std::move(ledger_);
  out.consumer_malicious = consumer_malicious_;
  out.provider_malicious = provider_malicious_;
  return out;
}

RunResult simulate(const ScenarioConfig& cfg, std::uint64_t seed) {
  Simulation sim(cfg, seed);
  return sim.run();
}

}  // namespace coolsim
