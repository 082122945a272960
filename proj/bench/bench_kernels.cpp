// Serial reference vs OpenMP kernels on the Monte-Carlo trial loops.

#include <benchmark/benchmark.h>

#include "cavreg/array_prep.hpp"
#include "cavreg/multiplex.hpp"
#include "cavreg/tomography.hpp"

namespace {

using namespace cavreg;

struct PrepFixture {
  TweezerGrid grid = TweezerGrid::rectangular(2, 8, 5.5e-6, 0.3);
  TargetPattern target = TargetPattern::centered_row(grid, 6);
  PrepConfig config = [] {
    PrepConfig c;
    c.per_move_survival = 0.84;
    return c;
  }();
};

void BM_PrepSerial(benchmark::State& state) {
  PrepFixture f;
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::simulate_preparation(
        f.grid, f.target, f.config, static_cast<std::size_t>(state.range(0)), 1));
}

void BM_PrepParallel(benchmark::State& state) {
  PrepFixture f;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_preparation(
        f.grid, f.target, f.config, static_cast<std::size_t>(state.range(0)), 1));
}

const std::vector<double> kEtas{0.25, 0.30, 0.33, 0.33, 0.30, 0.25};

void BM_AttemptsSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        serial::simulate_attempts(kEtas, static_cast<std::size_t>(state.range(0)), 1));
}

void BM_AttemptsParallel(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        simulate_attempts(kEtas, static_cast<std::size_t>(state.range(0)), 1));
}

std::vector<TwoQubitState> random_states(std::size_t n) {
  Rng rng(7);
  std::vector<TwoQubitState> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_physical_state(rng));
  return out;
}

void BM_TomographySerial(benchmark::State& state) {
  const auto states = random_states(static_cast<std::size_t>(state.range(0)));
  const auto env = PhotonEnvelope::uniform(1.25e-6, 201);
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::tomography_consistency(states, 3000, env, 1));
}

void BM_TomographyParallel(benchmark::State& state) {
  const auto states = random_states(static_cast<std::size_t>(state.range(0)));
  const auto env = PhotonEnvelope::uniform(1.25e-6, 201);
  for (auto _ : state)
    benchmark::DoNotOptimize(tomography_consistency(states, 3000, env, 1));
}

}  // namespace

BENCHMARK(BM_PrepSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PrepParallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AttemptsSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AttemptsParallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TomographySerial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TomographyParallel)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
