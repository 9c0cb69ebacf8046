// Copyright 2026 The slipgain Authors
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

#include <vector>

#include "benchmark/benchmark.h"
#include "slipgain/batch_eval.h"
#include "slipgain/experiments.h"

namespace slipgain {
namespace {

struct Workload {
  Config config;
  std::vector<Fixture> fixtures;
  std::vector<EpisodeJob> jobs;
};

const Workload& GetWorkload() {
  static const Workload w = [] {
    Workload out;
    out.fixtures = GenerateFixtures(kDefaultFixtureSeed, 20, out.config);
    for (double k : {0.5, 2.5, 5.0}) {
      for (std::size_t f = 0; f < out.fixtures.size(); ++f) {
        out.jobs.push_back({f, {k, k}, nullptr});
      }
    }
    return out;
  }();
  return w;
}

void BM_EvaluateSerial(benchmark::State& state) {
  const Workload& w = GetWorkload();
  for (auto _ : state) {
    benchmark::DoNotOptimize(EvaluateEpisodesSerial(w.jobs, w.fixtures, w.config));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(w.jobs.size()));
}
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_EvaluateParallel(benchmark::State& state) {
  const Workload& w = GetWorkload();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(EvaluateEpisodes(w.jobs, w.fixtures, w.config, threads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(w.jobs.size()));
}
BENCHMARK(BM_EvaluateParallel)
    ->Arg(1)
    ->Arg(2)
    ->Arg(4)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace
}  // namespace slipgain

BENCHMARK_MAIN();
