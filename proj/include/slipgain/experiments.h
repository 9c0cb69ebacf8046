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

#ifndef SLIPGAIN_EXPERIMENTS_H_
#define SLIPGAIN_EXPERIMENTS_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slipgain/config.h"
#include "slipgain/episode.h"
#include "slipgain/metrics.h"
#include "slipgain/mlp.h"

namespace slipgain {

enum class Metric {
  kAvgReward,
  kAvgLat,
  kAvgDv,
  kAvgDu,
  kEMax,
  kAvgLatSlip,
  kAvgDvSlip,
  kAvgDuSlip,
  kReturn,
};

inline constexpr std::array<Metric, 9> kAllMetrics = {
    Metric::kAvgReward, Metric::kAvgLat,     Metric::kAvgDv,
    Metric::kAvgDu,     Metric::kEMax,       Metric::kAvgLatSlip,
    Metric::kAvgDvSlip, Metric::kAvgDuSlip,  Metric::kReturn};

std::string_view MetricName(Metric m);
// Absent for slip metrics of an episode without slipping steps.
std::optional<double> MetricValue(const MetricsReport& report, Metric m);

struct MetricSummary {
  std::optional<double> mean;  // absent when no episode reported the metric
  double stddev = 0.0;
  int count = 0;
};

// Per-metric mean/std over episodes, plus the goal-reach rate.
struct Aggregate {
  std::array<MetricSummary, kAllMetrics.size()> metrics;
  double reach_rate = 0.0;
  int episodes = 0;

  const MetricSummary& operator[](Metric m) const {
    return metrics[static_cast<std::size_t>(m)];
  }
};

Aggregate AggregateReports(std::span<const MetricsReport> reports);

// 0.5, 1.0, ..., 5.0
std::vector<double> DefaultGainGrid();

inline constexpr std::uint64_t kDefaultFixtureSeed = 1;
inline constexpr int kDefaultFixtureCount = 100;

struct SweepSpec {
  std::vector<double> k_values = DefaultGainGrid();
  int n_fixtures = kDefaultFixtureCount;
  std::uint64_t master_seed = kDefaultFixtureSeed;
};

struct SweepCell {
  Gains gains;
  Aggregate aggregate;
};

// Cells ordered with k_stanley as the outer index and k_speed inner.
struct SweepResult {
  SweepSpec spec;
  std::uint64_t config_hash = 0;
  std::vector<SweepCell> cells;
};

// Every cell is evaluated on the same fixtures; results are reduced in cell
// order so the output does not depend on `threads`.
SweepResult RunSweep(const SweepSpec& spec, std::span<const Fixture> fixtures,
                     const Config& config, int threads = 0);

Aggregate EvaluateFixedGains(const Gains& gains,
                             std::span<const Fixture> fixtures,
                             const Config& config, int threads = 0);
Aggregate EvaluatePolicy(const Mlp& policy, std::span<const Fixture> fixtures,
                         const Config& config, int threads = 0);

// heatmap_<metric>.csv (k_stanley,k_speed,value) for the nine metrics,
// sweep_summary.csv with mean/std/reach rate per cell, sweep_meta.json.
void WriteSweep(const SweepResult& sweep, const std::string& dir);
SweepResult ReadSweep(const std::string& dir);

// Throws std::invalid_argument when the sweep was run on other fixtures.
void CheckFixtureMatch(const SweepSpec& spec, std::uint64_t master_seed,
                       int n_fixtures);

struct ComparisonRow {
  std::string metric;  // cost-like: lower is better
  std::optional<double> baseline;
  double baseline_std = 0.0;
  Gains baseline_gains;
  std::optional<double> adaptive;
  double adaptive_std = 0.0;
  std::optional<double> improvement_pct;  // (baseline - adaptive) / baseline
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;  // 4 long-term then 4 short-term
  double adaptive_reach_rate = 0.0;
};

// Pairs the best sweep cell of each metric against the adaptive aggregate.
// Average reward is compared as the cost -r.
ComparisonReport Compare(const SweepResult& sweep, const Aggregate& adaptive);
void WriteComparisonCsv(const ComparisonReport& report, const std::string& path);

// Mean K_stanley on low-friction steps vs other steps for one rollout.
struct ProbeResult {
  bool applicable = false;  // the rollout touched both kinds of ground
  int fixture_id = -1;
  int on_patch_steps = 0;
  int off_patch_steps = 0;
  double mean_k_on = 0.0;
  double mean_k_off = 0.0;
  bool passed = false;
};

// Uses the fixture whose trajectory has the most samples on low-friction
// cells (lowest id on ties).
ProbeResult SlipResponseProbe(const Mlp& policy,
                              std::span<const Fixture> fixtures,
                              const Config& config);
void WriteProbeCsv(const ProbeResult& probe, const std::string& path);

struct TrainingCurveRow {
  std::int64_t step = 0;
  int episode = 0;
  double eval_avg_reward = 0.0;
  double critic_loss = 0.0;
  double policy_loss = 0.0;
  double alpha = 0.0;
};

struct TrainResult {
  std::string final_checkpoint;  // serialized JSON
  std::string best_checkpoint;
  double best_eval_avg_reward = 0.0;
  std::vector<TrainingCurveRow> curve;
};

// SAC training on freshly generated fixtures, one per episode. Every
// eval_every steps the deterministic policy is scored on a held-out
// validation set (disjoint from the default test fixtures); the best scoring
// policy is kept.
TrainResult Train(const Config& config, std::uint64_t seed,
                  const std::function<void(const TrainingCurveRow&)>& progress =
                      nullptr);

void WriteTrainingCurve(std::span<const TrainingCurveRow> curve,
                        const std::string& path);

}  // namespace slipgain

#endif  // SLIPGAIN_EXPERIMENTS_H_
