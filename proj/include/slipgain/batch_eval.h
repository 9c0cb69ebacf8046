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

#ifndef SLIPGAIN_BATCH_EVAL_H_
#define SLIPGAIN_BATCH_EVAL_H_

#include <cstddef>
#include <span>
#include <vector>

#include "slipgain/config.h"
#include "slipgain/episode.h"
#include "slipgain/metrics.h"
#include "slipgain/mlp.h"

namespace slipgain {

// One episode to evaluate: a fixture index plus either fixed gains or, when
// `policy` is set, the deterministic policy output.
struct EpisodeJob {
  std::size_t fixture = 0;
  Gains gains;
  const Mlp* policy = nullptr;
};

// Runs every job and returns its metrics in job order. `threads` <= 0 uses
// the OpenMP default. Each result depends only on its job, so the output is
// identical for any thread count.
std::vector<MetricsReport> EvaluateEpisodes(std::span<const EpisodeJob> jobs,
                                            std::span<const Fixture> fixtures,
                                            const Config& config,
                                            int threads = 0);

// Serial reference for EvaluateEpisodes.
std::vector<MetricsReport> EvaluateEpisodesSerial(
    std::span<const EpisodeJob> jobs, std::span<const Fixture> fixtures,
    const Config& config);

}  // namespace slipgain

#endif  // SLIPGAIN_BATCH_EVAL_H_
