#include <benchmark/benchmark.h>

#include <algorithm>

#include "cbo/optimal.hpp"
#include "cbo/policies.hpp"
#include "cbo/simulator.hpp"

using namespace cbo;

namespace {

FrameTrace trace_of(int frames) {
  TraceSpec spec;
  spec.frame_count = frames;
  spec.seed = 42;
  return generate_trace(spec);
}

NetworkModel network(double mbps) {
  NetworkModel n;
  n.bandwidth_bps = mbps * 1e6;
  return n;
}

void BM_SolveOptimal(benchmark::State& state) {
  const auto frames = static_cast<int>(state.range(0));
  const auto trace = trace_of(frames);
  const auto profile = default_profile();
  const TimingConfig timing(30, 0.2, frames);
  const auto net = network(static_cast<double>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_optimal(trace, profile, net, timing, SimParams{}.local_delay_s()));
  }
  state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(BM_SolveOptimal)->Args({200, 2})->Args({200, 5})->Args({200, 20})->Args({1000, 5});

void BM_CboDecide(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto trace = trace_of(static_cast<int>(k));
  const auto profile = default_profile();
  std::vector<BufferedFrame> buffered;
  for (const auto& f : trace.frames) {
    buffered.push_back(BufferedFrame{f.index, Millis{0}, Millis{0}, f.calibrated_confidence, f.size_bytes});
  }
  std::stable_sort(buffered.begin(), buffered.end(),
                   [](const auto& a, const auto& b) { return a.confidence > b.confidence; });
  const auto link = LinkTiming::from(network(static_cast<double>(state.range(1))), TimingConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(cbo_decide(buffered, profile, link, Millis{0}));
}
BENCHMARK(BM_CboDecide)->Args({4, 5})->Args({8, 5})->Args({16, 5})->Args({8, 50});

void BM_SimulateCbo(benchmark::State& state) {
  const auto frames = static_cast<int>(state.range(0));
  const auto trace = trace_of(frames);
  const auto profile = default_profile();
  const TimingConfig timing(30, 0.2, frames);
  for (auto _ : state) {
    CboPolicy cbo;
    benchmark::DoNotOptimize(run(cbo, trace, profile, network(5), timing));
  }
  state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(BM_SimulateCbo)->Arg(1000)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
