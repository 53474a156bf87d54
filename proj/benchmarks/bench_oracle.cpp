#include <benchmark/benchmark.h>

#include "homodyne/fock_oracle.hpp"
#include "homodyne/schemes.hpp"

using namespace homodyne;

namespace {

void BM_OracleFig1(benchmark::State& state) {
  const auto net = build_balanced_homodyne();
  const StateAssignment st{{"b", ModeState::coherent({0.3, 0.1})}, {"l_i", ModeState::coherent(0.6)}};
  FockConfig cfg;
  cfg.cutoff = static_cast<int>(state.range(0));
  cfg.max_tail = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(oracle_network(net, st, cfg));
}
BENCHMARK(BM_OracleFig1)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_OracleFig2(benchmark::State& state) {
  const auto net = build_eight_port();
  const StateAssignment st{{"b", ModeState::coherent({0.3, 0.1})}, {"l_i", ModeState::coherent(0.6)}};
  FockConfig cfg;
  cfg.cutoff = static_cast<int>(state.range(0));
  cfg.max_tail = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(oracle_network(net, st.bound_to(net), cfg));
}
BENCHMARK(BM_OracleFig2)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_TwoModeUnitary(benchmark::State& state) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd m;
  m << s, s, s, -s;
  const int cutoff = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(two_mode_unitary(m, cutoff));
}
BENCHMARK(BM_TwoModeUnitary)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace
