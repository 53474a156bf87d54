#include <benchmark/benchmark.h>

#include "homodyne/mode_algebra.hpp"
#include "homodyne/network.hpp"
#include "homodyne/schemes.hpp"

using namespace homodyne;

namespace {

OperatorPoly linear_sum(int modes, bool creators) {
  OperatorPoly p;
  for (int k = 0; k < modes; ++k) {
    const ModeId m("m" + std::to_string(k));
    p += (creators ? OperatorPoly::creator(m) : OperatorPoly::annihilator(m)) * Complex(1.0 + k, 0.5 * k);
  }
  return p;
}

void BM_Multiply(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const auto x = linear_sum(modes, false) * linear_sum(modes, true);
  const auto y = linear_sum(modes, true) * linear_sum(modes, false);
  for (auto _ : state) benchmark::DoNotOptimize(x * y);
  state.counters["terms"] = static_cast<double>((x * y).size());
}
BENCHMARK(BM_Multiply)->Arg(2)->Arg(4)->Arg(8);

void BM_EightPortObservables(benchmark::State& state) {
  const auto net = build_eight_port();
  for (auto _ : state) {
    benchmark::DoNotOptimize(observable_sD1D2(net).op());
    benchmark::DoNotOptimize(observable_sD3D4(net).op());
  }
}
BENCHMARK(BM_EightPortObservables);

}  // namespace
