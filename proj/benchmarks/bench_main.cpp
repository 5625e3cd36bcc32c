#include <benchmark/benchmark.h>

#include "coolsim/rng.hpp"
#include "coolsim/selection.hpp"
#include "coolsim/sim_engine.hpp"
#include "coolsim/simulation.hpp"

namespace {

using namespace coolsim;

// Steady-state queue of `range(0)` pending events, one reschedule per dispatch.
void BM_EngineDispatch(benchmark::State& state) {
  const auto pending = static_cast<std::uint64_t>(state.range(0));
  RngStream rng = rng_stream("bench-engine", 1);
  std::uint64_t dispatched = 0;
  for (auto _ : state) {
    state.PauseTiming();
    Engine engine;
    engine.set_handler([&](const Event& e) {
      ++dispatched;
      engine.schedule(engine.now() + rng.exponential(1.0), e.kind, e.payload);
    });
    for (std::uint64_t i = 0; i < pending; ++i) engine.schedule(rng.exponential(1.0), EventKind::kRequestArrives, i);
    state.ResumeTiming();
    engine.run_until(1000.0);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(dispatched));
}
BENCHMARK(BM_EngineDispatch)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SelectionUpdate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PsmParams params;
  SelectionState sel(n, params);
  RngStream rng = rng_stream("bench-selection", 1);
  for (ProviderId p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < 2 * params.s; ++k) sel.record_sample(p, 5.0 + 40.0 * rng.uniform(), 0.0);
  }
  for (auto _ : state) {
    sel.update();
    benchmark::DoNotOptimize(sel.ratios().data());
  }
}
BENCHMARK(BM_SelectionUpdate)->Arg(8)->Arg(48);

void BM_SelectProvider(benchmark::State& state) {
  const std::vector<double> ratios(48, 1.0 / 48.0);
  RngStream rng = rng_stream("bench-select", 1);
  for (auto _ : state) benchmark::DoNotOptimize(select_provider(ratios, rng));
}
BENCHMARK(BM_SelectProvider);

void BM_ScenarioRun(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.attack = AttackKind::kCuckooD;
  cfg.p_m = 0.375;
  cfg.horizon_s = 20.0;
  cfg.warmup_s = 5.0;
  std::uint64_t seed = 1;
  std::size_t requests = 0;
  for (auto _ : state) {
    const auto r = simulate(cfg, seed++);
    requests += r.records.size();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(requests));
}
BENCHMARK(BM_ScenarioRun)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
