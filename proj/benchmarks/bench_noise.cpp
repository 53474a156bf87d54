#include <benchmark/benchmark.h>

#include "homodyne/noise.hpp"
#include "homodyne/schemes.hpp"

using namespace homodyne;

namespace {

void BM_EightPortNoise(benchmark::State& state) {
  const auto net = build_eight_port();
  const Complex gamma(2.0, 1.0);
  const StateAssignment st{{"b", ModeState::squeezed(0.6, 0.3, {0.4, -0.2})},
                           {"l_i", ModeState::coherent(gamma)},
                           {"e_i", ModeState::vacuum()},
                           {"f_i", ModeState::vacuum()}};
  for (auto _ : state) benchmark::DoNotOptimize(eight_port_noise(net, gamma, st));
}
BENCHMARK(BM_EightPortNoise);

void BM_MonteCarlo(benchmark::State& state) {
  const auto net = build_balanced_homodyne();
  const StateAssignment st{{"b", ModeState::coherent({0.5, 0.2})}, {"l_i", ModeState::coherent(2.0)}};
  const auto shots = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mc_counts(net, st, shots, seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(shots));
}
BENCHMARK(BM_MonteCarlo)->Arg(1 << 16)->Arg(1 << 20);

}  // namespace
