// Serial reference path against the OpenMP path for the three data-parallel
// kernels. Arg 0 = Serial, 1 = Parallel.
#include <benchmark/benchmark.h>

#include <numbers>

#include "tbq/measurement.hpp"
#include "tbq/montecarlo.hpp"

using namespace tbq;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

const PulseSequence& sequence() {
  static const PulseSequence seq = two_pulse_sequence(std::numbers::pi / 2, std::numbers::pi);
  return seq;
}

const EventStream& gated() {
  static const EventStream s = [] {
    PhysicalParams p;
    p.background_rate = 0.05;
    return measure::gate_default(mc::run(sequence(), p, 200000, 1));
  }();
  return s;
}

void BM_MonteCarlo(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mc::run(sequence(), PhysicalParams{}, 200000, 1, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * 200000);
}

void BM_Michelson(benchmark::State& state) {
  const auto& s = gated();
  for (auto _ : state) benchmark::DoNotOptimize(measure::michelson(s, 0.3, {0.0, 0, exec_of(state)}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.events.size()));
}

void BM_Filter(benchmark::State& state) {
  const auto& s = gated();
  for (auto _ : state) benchmark::DoNotOptimize(measure::spectral_filter(s, 0.0, 2.0, 1e-3, 0, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.events.size()));
}

void BM_G2(benchmark::State& state) {
  const auto& s = gated();
  for (auto _ : state)
    benchmark::DoNotOptimize(measure::hbt_g2(s, measure::default_period(s), 5, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.events.size()));
}

}  // namespace

BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Michelson)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Filter)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_G2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
