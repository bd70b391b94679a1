#include <benchmark/benchmark.h>

#include "qcap/divergences.hpp"
#include "qcap/protosim.hpp"

using namespace qcap;

namespace {

Op make_state(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(rng, {{"S", d}});
}

void bm_tensor(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Op a = make_state(d, 1);
  const Op b = make_state(d, 2).relabeled({{"T", d}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(tensor(a, b));
  }
}
BENCHMARK(bm_tensor)->Arg(4)->Arg(8)->Arg(16);

void bm_partial_trace(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(3);
  const Op rho = random_density(rng, {{"A", d}, {"B", d}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(partial_trace(rho, {"B"}));
  }
}
BENCHMARK(bm_partial_trace)->Arg(4)->Arg(8)->Arg(16);

void bm_dh_eps(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Op rho = make_state(d, 4);
  const Op sigma = make_state(d, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dh_eps(rho, sigma, 0.1));
  }
}
BENCHMARK(bm_dh_eps)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void bm_dmax_smooth(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Op rho = make_state(d, 6);
  const Op sigma = make_state(d, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dmax_smooth(rho, sigma, 0.2));
  }
}
BENCHMARK(bm_dmax_smooth)->Arg(2)->Arg(4)->Arg(8);

void bm_square_root_measurement(benchmark::State& state) {
  const int parts = static_cast<int>(state.range(0));
  Rng rng(8);
  std::vector<Op> gs;
  for (int i = 0; i < parts; ++i) gs.push_back(random_density(rng, {{"S", 8}}));
  for (auto _ : state) {
    benchmark::DoNotOptimize(square_root_measurement(gs));
  }
}
BENCHMARK(bm_square_root_measurement)->Arg(2)->Arg(4)->Arg(8);

void bm_convex_split(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  Rng rng(9);
  const Op rho = random_density(rng, {{"A", 2}, {"B", 2}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(convex_split_check(rho, {"A"}, k));
  }
}
BENCHMARK(bm_convex_split)->Arg(2)->Arg(4)->Arg(6);

} // namespace

BENCHMARK_MAIN();
