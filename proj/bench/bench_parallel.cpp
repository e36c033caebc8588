#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "harvest/config.hpp"
#include "harvest/metrics.hpp"
#include "harvest/stoch_sched.hpp"

using namespace harvest;

namespace {

HarvestSetup desk() {
  return parse_run_config(load_json_file(std::string(HARVEST_SOURCE_DIR) + "/configs/desk.json")).setup;
}

std::vector<Scenario> scenarios(std::size_t count, std::size_t requests) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> fill(0.0, 120.0), way(5.0, 60.0), self(20.0, 200.0);
  std::vector<Scenario> out(count);
  for (auto& s : out) {
    for (std::size_t i = 0; i < requests; ++i) {
      s.requests.push_back({static_cast<int>(i), std::round(fill(gen)), std::round(way(gen)), std::round(self(gen)), 30.0});
    }
  }
  return out;
}

ScenarioSettings two_robots() {
  ScenarioSettings s;
  s.availability = {0.0, 20.0};
  return s;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const HarvestSetup s = desk();
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_serial(s, static_cast<std::size_t>(state.range(0)), 1));
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const HarvestSetup s = desk();
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(s, static_cast<std::size_t>(state.range(0)), 1));
}

void BM_ScenariosSerial(benchmark::State& state) {
  const auto scn = scenarios(static_cast<std::size_t>(state.range(0)), 6);
  const auto settings = two_robots();
  for (auto _ : state) benchmark::DoNotOptimize(solve_scenarios_serial(scn, settings, true));
}

void BM_ScenariosParallel(benchmark::State& state) {
  const auto scn = scenarios(static_cast<std::size_t>(state.range(0)), 6);
  const auto settings = two_robots();
  for (auto _ : state) benchmark::DoNotOptimize(solve_scenarios(scn, settings, true));
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarloParallel)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScenariosSerial)->Arg(50)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScenariosParallel)->Arg(50)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
