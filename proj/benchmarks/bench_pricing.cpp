#include <benchmark/benchmark.h>

#include "qdp/circuits.hpp"
#include "qdp/mlae.hpp"

namespace {

qdp::GbmParams base() { return {2.0, 0.07, 0.3, 1.0, 0.07}; }

// Single controlled rotation on the payoff qudit, controlled on c and the top asset digit.
void BM_ApplyGate(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const auto layout = qdp::pricing_layout(d, n, qdp::ComparatorVariant::SingleAncilla);
  const qdp::ControlledGate gate{{{"c", {1}}, {"i" + std::to_string(n - 1), {d - 1}}}, "p", qdp::RotationY{0.3}};
  qdp::StateVector s = qdp::init_ground(layout);
  for (auto _ : state) {
    s = qdp::apply_gate(s, gate);
    benchmark::DoNotOptimize(s.amps().data());
  }
  state.counters["dim"] = static_cast<double>(layout.total_dim());
}
BENCHMARK(BM_ApplyGate)->Args({8, 1})->Args({4, 3})->Args({8, 2})->Args({2, 8});

void BM_BuildOracle(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const auto grid = qdp::build_grid(base(), d, n);
  for (auto _ : state) {
    auto oracle = qdp::build_oracle_A(grid, 1.7, 0.05, qdp::ComparatorVariant::LinearAncilla);
    benchmark::DoNotOptimize(oracle.a.matrix().data());
  }
}
BENCHMARK(BM_BuildOracle)->Args({8, 1})->Args({3, 2})->Args({4, 2})->Args({2, 4})->Unit(benchmark::kMillisecond);

void BM_MleEstimate(benchmark::State& state) {
  qdp::RandomStream rng(11);
  const auto records = qdp::synthetic_records(0.4, qdp::Schedule::make(static_cast<int>(state.range(0)), 100), rng);
  for (auto _ : state) benchmark::DoNotOptimize(qdp::mle_estimate(records).theta_hat);
}
BENCHMARK(BM_MleEstimate)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_PriceImplicitGrover(benchmark::State& state) {
  const auto oracle = qdp::build_oracle_A(qdp::build_grid(base(), 8, 1), 1.7, 0.05, qdp::ComparatorVariant::LinearAncilla);
  const auto schedule = qdp::Schedule::make(7, 100);
  for (auto _ : state) {
    qdp::RandomStream rng(5);
    benchmark::DoNotOptimize(qdp::run_schedule(oracle.a, schedule, rng).size());
  }
}
BENCHMARK(BM_PriceImplicitGrover)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
