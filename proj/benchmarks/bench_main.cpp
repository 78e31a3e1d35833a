// Copyright 2026 The ivcsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "ivc/analytics.hpp"
#include "ivc/scenario_io.hpp"

namespace {

constexpr std::string_view kAlert = "alert/11-newton-7/john3/6-king-1/john/092310/10000/NULL/accident";

void BM_ParseMessage(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ivc::parse_message(kAlert));
}
BENCHMARK(BM_ParseMessage);

void BM_FormatMessage(benchmark::State& state) {
  const ivc::Message m = ivc::parse_message(kAlert);
  for (auto _ : state) benchmark::DoNotOptimize(ivc::format_message(m));
}
BENCHMARK(BM_FormatMessage);

void BM_SealOpen(benchmark::State& state) {
  const ivc::XorCrcSuite suite(ivc::Bytes{1, 2, 3, 4});
  const ivc::Message m = ivc::parse_message(kAlert);
  for (auto _ : state) benchmark::DoNotOptimize(ivc::open(ivc::seal(m, suite), suite));
}
BENCHMARK(BM_SealOpen);

void BM_DiscoveryTable(benchmark::State& state) {
  const auto devices = ivc::default_discovery_devices();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ivc::discovery_table(devices, 0.5, static_cast<std::size_t>(state.range(0)), 1));
  }
}
BENCHMARK(BM_DiscoveryTable)->Arg(10000);

void BM_Scenario(benchmark::State& state, const char* name) {
  const ivc::Scenario sc = ivc::load_scenario(std::string(IVC_SCENARIO_DIR) + "/" + name);
  for (auto _ : state) benchmark::DoNotOptimize(ivc::run(sc));
}
BENCHMARK_CAPTURE(BM_Scenario, convoy_alert, "convoy_alert.yaml")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scenario, convoy_query, "convoy_query.yaml")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scenario, persistent_alert, "persistent_alert.yaml")->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
