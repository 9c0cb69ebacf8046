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

#include "slipgain/batch_eval.h"

#include <exception>
#include <stdexcept>

#include <omp.h>

namespace slipgain {

namespace {

MetricsReport RunJob(const EpisodeJob& job, std::span<const Fixture> fixtures,
                     const Config& config) {
  if (job.fixture >= fixtures.size()) {
    throw std::out_of_range("episode job references a missing fixture");
  }
  const Fixture& f = fixtures[job.fixture];
  const GainFn source =
      job.policy ? PolicyGains(*job.policy,
                               {config.sac.action_low, config.sac.action_high})
                 : FixedGains(job.gains);
  const EpisodeTrace trace = RunEpisode(f.trajectory, f.world, source, config);
  return ComputeMetrics(trace, config.sac.gamma);
}

}  // namespace

std::vector<MetricsReport> EvaluateEpisodes(std::span<const EpisodeJob> jobs,
                                            std::span<const Fixture> fixtures,
                                            const Config& config,
                                            int threads) {
  std::vector<MetricsReport> out(jobs.size());
  std::exception_ptr failure;
  const int n = static_cast<int>(jobs.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = RunJob(jobs[i], fixtures, config);
    } catch (...) {
#pragma omp critical(slipgain_batch_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<MetricsReport> EvaluateEpisodesSerial(
    std::span<const EpisodeJob> jobs, std::span<const Fixture> fixtures,
    const Config& config) {
  std::vector<MetricsReport> out;
  out.reserve(jobs.size());
  for (const EpisodeJob& job : jobs) out.push_back(RunJob(job, fixtures, config));
  return out;
}

}  // namespace slipgain
