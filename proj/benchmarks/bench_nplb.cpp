#include <benchmark/benchmark.h>

#include "nplb/controller.hpp"
#include "nplb/detmetrics.hpp"
#include "nplb/montecarlo.hpp"
#include "nplb/scenario.hpp"

namespace {

using namespace nplb;

void BM_ControllerStep(benchmark::State& state) {
  const ControllerConfig config;
  const DetectionFrame frame{0, {{ObjectClass::ElderlyWithoutDisability, 7, 0.9}}};
  for (auto _ : state) {
    ControllerState s = new_controller(config, 1e9);
    benchmark::DoNotOptimize(advance(s, frame, config));
  }
}
BENCHMARK(BM_ControllerStep);

void BM_SimulateNplbTrial(benchmark::State& state) {
  const Scenario s{PedestrianType::Elderly, 2.6, 60.0, 1.5};
  std::uint64_t trial = 0;
  for (auto _ : state) {
    RandomStream det = RandomStream::for_trial(kDefaultSeed, trial++, StreamTag::Detection);
    benchmark::DoNotOptimize(simulate_nplb(s, {}, {}, 0.26, det));
  }
}
BENCHMARK(BM_SimulateNplbTrial);

void BM_RunComparison(benchmark::State& state) {
  SimConfig config;
  config.n_trials = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(run_comparison(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunComparison)->Arg(1'000)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_MapOverRange(benchmark::State& state) {
  std::vector<GroundTruth> gts;
  std::vector<Prediction> preds;
  const int images = static_cast<int>(state.range(0));
  for (int i = 0; i < images; ++i) {
    const std::string id = std::to_string(i);
    for (int k = 0; k < 4; ++k) {
      const double x = 40.0 * k;
      gts.push_back({id, k, {x, 0, x + 30, 30}});
      preds.push_back({id, k, {x + 2, 1, x + 31, 32}, 0.9 - 0.1 * k});
      preds.push_back({id, (k + 1) % 4, {x + 5, 5, x + 25, 40}, 0.3});
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(map_over_range(preds, gts));
}
BENCHMARK(BM_MapOverRange)->Arg(100)->Arg(1'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
