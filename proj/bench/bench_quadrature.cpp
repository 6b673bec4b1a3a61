#include <benchmark/benchmark.h>

#include "rtb/approximator.hpp"
#include "rtb/patch_io.hpp"

using namespace rtb;

namespace {

const RationalPatch &table1() {
  static const RationalPatch R = read_patch(RTB_FIXTURE_DIR "/table1.json").rational();
  return R;
}

Execution mode(const benchmark::State &state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_IntegralCollection(benchmark::State &state) {
  const auto &R = table1();
  QuadratureOptions opts;
  opts.execution = mode(state);
  const int N = int(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(integral_collection(R.degree, R.weights, N - R.degree, {0, 0, 0}, {-0.5, -0.5, -0.5}, opts));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}

void BM_Approximate(benchmark::State &state) {
  const auto &R = table1();
  ApproximationProblem pb{R, int(state.range(1)), {0, 0, 0}, {}, {-0.5, -0.5, -0.5}, {}};
  pb.quadrature.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(approximate(pb));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}

void BM_ErrorGrid(benchmark::State &state) {
  const auto &R = table1();
  const auto P = approximate({R, 5, {0, 0, 0}, {}, {-0.5, -0.5, -0.5}, {}}).patch;
  for (auto _ : state) benchmark::DoNotOptimize(error_grid(R, P, int(state.range(1)), mode(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_IntegralCollection)->ArgsProduct({{0, 1}, {22, 42, 80}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Approximate)->ArgsProduct({{0, 1}, {5, 10}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ErrorGrid)->ArgsProduct({{0, 1}, {200, 800}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
