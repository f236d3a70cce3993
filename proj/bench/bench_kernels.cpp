#include <benchmark/benchmark.h>

#include "coopbeacon/analysis.hpp"
#include "coopbeacon/kernels.hpp"

using namespace coopbeacon;

namespace {

SweepSpec bench_spec(Scheme scheme) {
  SweepSpec s;
  s.scheme = scheme;
  s.rho_grid_db = {30.0};
  s.links = LinkTriple::direct(1.0, 2.0, 3.0);
  s.cfg = ProtocolConfig::with_split(db_to_linear(30.0), 0.5, 2);
  s.seed = 1;
  if (scheme == Scheme::MUCSA) {
    s.pairs = 2;
    s.multiuser = MultiuserLinks::uniform(2, 1.0);
  }
  return s;
}

void BM_Serial(benchmark::State& state) {
  const SweepSpec spec = bench_spec(static_cast<Scheme>(state.range(0)));
  const auto n = static_cast<std::uint64_t>(state.range(1));
  for (auto _ : state) {
    auto acc = accumulate_serial<3>(n, [&](std::uint64_t i) { return sweep_trial(spec, spec.cfg, i); });
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(1));
}

void BM_Parallel(benchmark::State& state) {
  const SweepSpec spec = bench_spec(static_cast<Scheme>(state.range(0)));
  const auto n = static_cast<std::uint64_t>(state.range(1));
  const int threads = static_cast<int>(state.range(2));
  for (auto _ : state) {
    auto acc = accumulate_parallel<3>(
        n, [&](std::uint64_t i) { return sweep_trial(spec, spec.cfg, i); }, threads);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(1));
}

}  // namespace

BENCHMARK(BM_Serial)
    ->ArgsProduct({{static_cast<int>(Scheme::NC), static_cast<int>(Scheme::OCSA), static_cast<int>(Scheme::MUCSA)},
                   {1 << 16}})
    ->Unit(benchmark::kMillisecond);

BENCHMARK(BM_Parallel)
    ->ArgsProduct({{static_cast<int>(Scheme::NC), static_cast<int>(Scheme::OCSA), static_cast<int>(Scheme::MUCSA)},
                   {1 << 16},
                   {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
