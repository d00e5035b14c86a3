#include <benchmark/benchmark.h>

#include "rxscale/exemplars.hpp"
#include "rxscale/limits.hpp"
#include "rxscale/network.hpp"
#include "rxscale/rng.hpp"
#include "rxscale/simulate.hpp"

namespace {

using namespace rxscale;

void BM_SsaDirect(benchmark::State& state) {
  Exemplar ex = exemplar("isom-1");
  StopRule stop;
  stop.horizon = 1.0;
  std::uint64_t seed = 1;
  std::int64_t events = 0;
  for (auto _ : state) {
    Trajectory traj = ssa_run(ex.network, ex.network.initial_state(), stop, seed++);
    events += static_cast<std::int64_t>(traj.n_jumps());
    benchmark::DoNotOptimize(traj.final_state);
  }
  state.counters["events/s"] =
      benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SsaDirect)->Unit(benchmark::kMillisecond);

void BM_SsaNextReaction(benchmark::State& state) {
  Exemplar ex = exemplar("isom-1");
  StopRule stop;
  stop.horizon = 1.0;
  std::uint64_t seed = 1;
  std::int64_t events = 0;
  for (auto _ : state) {
    Trajectory traj = ssa_run(ex.network, ex.network.initial_state(), stop, seed++,
                              SsaMethod::NextReaction);
    events += static_cast<std::int64_t>(traj.n_jumps());
    benchmark::DoNotOptimize(traj.final_state);
  }
  state.counters["events/s"] =
      benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SsaNextReaction)->Unit(benchmark::kMillisecond);

void BM_Propensities(benchmark::State& state) {
  Exemplar ex = exemplar("viral");
  State x = ex.network.initial_state();
  x[0] = 37;
  x[1] = 215;
  x[2] = 4012;
  double acc = 0;
  for (auto _ : state) {
    for (int k = 0; k < ex.network.n_reactions(); ++k) acc += ex.network.propensity(k, x);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_Propensities);

void BM_EulerMaruyama(benchmark::State& state) {
  Exemplar ex = exemplar("isom-1");
  SDEModel sde = diffusion_approx(ex.network, 1000.0);
  std::vector<double> init = {1.2, 0.6, 0.0};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    OdePath p = simulate_em(sde, init, 1.0, 1e-3, seed++, 2);
    benchmark::DoNotOptimize(p.values);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_EulerMaruyama)->Unit(benchmark::kMicrosecond);

void BM_RngExponential(benchmark::State& state) {
  Rng rng = Rng::seeded(42);
  double acc = 0;
  for (auto _ : state) acc += rng.exponential(1.0);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RngExponential);

}  // namespace

BENCHMARK_MAIN();
