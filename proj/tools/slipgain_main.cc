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

// Command-line front end: gen, sweep, train, eval, compare, trace.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slipgain/batch_eval.h"
#include "slipgain/config.h"
#include "slipgain/episode.h"
#include "slipgain/experiments.h"
#include "slipgain/metrics.h"
#include "slipgain/sac.h"
#include "slipgain/trajectory.h"
#include "slipgain/world.h"

namespace {

using namespace slipgain;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int jobs = 0;
};

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

Config LoadOrDefault(const GlobalOptions& g) {
  Config c = g.config_path.empty() ? Config{} : LoadConfig(g.config_path);
  c.Validate();
  return c;
}

Mlp ReadPolicy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open checkpoint " + path);
  return LoadPolicyFromCheckpoint(in);
}

Gains ParseGains(const std::vector<double>& v) {
  if (v.size() != 2) throw std::invalid_argument("--gains expects K_stanley K_speed");
  return {v[0], v[1]};
}

void PrintAggregate(const std::string& label, const Aggregate& a) {
  std::cout << label << ": reach_rate=" << a.reach_rate;
  for (Metric m : kAllMetrics) {
    const MetricSummary& s = a[m];
    std::cout << ' ' << MetricName(m) << '=';
    if (s.mean) {
      std::cout << *s.mean;
    } else {
      std::cout << "absent";
    }
  }
  std::cout << '\n';
}

void WriteAggregateCsv(const Aggregate& a, const std::filesystem::path& path) {
  std::ofstream out = OpenOut(path);
  out.precision(17);
  out << "metric,mean,std,count\n";
  for (Metric m : kAllMetrics) {
    const MetricSummary& s = a[m];
    out << MetricName(m) << ',';
    if (s.mean) out << *s.mean;
    out << ',' << s.stddev << ',' << s.count << '\n';
  }
  out << "reach_rate," << a.reach_rate << ",0," << a.episodes << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Stanley/speed gain tuning workbench"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config_path, "INI config file")
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed_value,
                                  "fixture master seed (train: training seed)");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--jobs", g.jobs, "worker threads for episode batches");

  int count = kDefaultFixtureCount;
  auto* gen = app.add_subcommand("gen", "emit fixture trajectories and maps");
  gen->add_option("--count", count, "number of fixtures");

  auto* sweep = app.add_subcommand("sweep", "fixed-gain parameter sweep");
  sweep->add_option("--count", count, "number of fixtures");
  std::vector<double> k_values;
  sweep->add_option("--k-values", k_values, "gain grid (default 0.5..5.0)");

  std::int64_t steps = -1;
  std::int64_t eval_every = -1;
  std::string checkpoint;
  auto* train = app.add_subcommand("train", "train the SAC gain policy");
  train->add_option("--steps", steps, "environment steps");
  train->add_option("--eval-every", eval_every, "validation interval (steps)");
  train->add_option("--checkpoint", checkpoint,
                    "final checkpoint path (default <out-dir>/checkpoint_final.json)");

  std::vector<double> gains;
  std::string label = "policy";
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint or fixed gains");
  eval->add_option("--checkpoint", checkpoint, "policy checkpoint");
  eval->add_option("--gains", gains, "fixed gains K_stanley K_speed")->expected(2);
  eval->add_option("--count", count, "number of fixtures");
  eval->add_option("--label", label, "output file label");

  std::string sweep_dir;
  auto* compare = app.add_subcommand("compare", "adaptive policy vs best sweep cells");
  compare->add_option("--checkpoint", checkpoint, "policy checkpoint")->required();
  compare->add_option("--sweep-dir", sweep_dir, "sweep output (default <out-dir>)");
  compare->add_option("--count", count, "number of fixtures");

  int fixture_id = 0;
  auto* trace = app.add_subcommand("trace", "dump one episode as JSONL");
  trace->add_option("--fixture", fixture_id, "fixture index");
  trace->add_option("--checkpoint", checkpoint, "policy checkpoint");
  trace->add_option("--gains", gains, "fixed gains K_stanley K_speed")->expected(2);

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed_value;
  const std::filesystem::path out_dir(g.out_dir);

  try {
    Config config = LoadOrDefault(g);
    const std::uint64_t fixture_seed = g.seed.value_or(kDefaultFixtureSeed);
    if (count < 1) throw std::invalid_argument("--count must be positive");

    if (*gen) {
      const auto fixtures = GenerateFixtures(fixture_seed, count, config);
      nlohmann::ordered_json index;
      index["master_seed"] = fixture_seed;
      index["count"] = count;
      for (const Fixture& f : fixtures) {
        const std::string id = std::to_string(f.id);
        std::ofstream t = OpenOut(out_dir / "fixtures" / ("trajectory_" + id + ".csv"));
        WriteTrajectoryCsv(f.trajectory, t);
        std::ofstream w = OpenOut(out_dir / "fixtures" / ("world_" + id + ".csv"));
        WriteFrictionCsv(f.world, w);
        index["fixtures"].push_back({{"id", f.id},
                                     {"seed", f.seed},
                                     {"samples", f.trajectory.size()},
                                     {"low_cells", f.world.low_cell_count()},
                                     {"cells", f.world.cell_count()}});
      }
      OpenOut(out_dir / "fixtures" / "fixtures.json") << index.dump(2) << '\n';
      std::cout << "wrote " << count << " fixtures to " << (out_dir / "fixtures") << '\n';
    } else if (*sweep) {
      SweepSpec spec;
      if (!k_values.empty()) spec.k_values = k_values;
      spec.n_fixtures = count;
      spec.master_seed = fixture_seed;
      const auto fixtures = GenerateFixtures(fixture_seed, count, config);
      const SweepResult result = RunSweep(spec, fixtures, config, g.jobs);
      WriteSweep(result, out_dir.string());
      std::cout << "sweep: " << result.cells.size() << " cells x " << count
                << " fixtures -> " << out_dir << '\n';
    } else if (*train) {
      if (steps >= 0) config.train.steps = steps;
      if (eval_every > 0) config.train.eval_every = eval_every;
      const std::uint64_t train_seed = g.seed.value_or(0);
      TrainResult result;
      try {
        result = Train(config, train_seed, [](const TrainingCurveRow& r) {
          std::cout << "step " << r.step << " episode " << r.episode
                    << " eval_avg_reward " << r.eval_avg_reward << " alpha "
                    << r.alpha << std::endl;
        });
      } catch (const NonFiniteLossError& e) {
        OpenOut(out_dir / "nan_batch.json") << e.batch_dump() << '\n';
        throw;
      }
      const std::filesystem::path final_path =
          checkpoint.empty() ? out_dir / "checkpoint_final.json"
                             : std::filesystem::path(checkpoint);
      OpenOut(final_path) << result.final_checkpoint;
      OpenOut(out_dir / "checkpoint_best.json") << result.best_checkpoint;
      WriteTrainingCurve(result.curve, (out_dir / "training_curve.csv").string());
      std::cout << "best validation avg reward " << result.best_eval_avg_reward
                << "; wrote " << final_path << '\n';
    } else if (*eval) {
      const auto fixtures = GenerateFixtures(fixture_seed, count, config);
      std::vector<EpisodeJob> jobs;
      std::optional<Mlp> policy;
      if (!checkpoint.empty()) {
        policy = ReadPolicy(checkpoint);
      } else if (gains.empty()) {
        throw std::invalid_argument("eval needs --checkpoint or --gains");
      }
      for (std::size_t f = 0; f < fixtures.size(); ++f) {
        jobs.push_back({f, policy ? Gains{} : ParseGains(gains),
                        policy ? &*policy : nullptr});
      }
      const auto reports = EvaluateEpisodes(jobs, fixtures, config, g.jobs);
      std::ofstream per = OpenOut(out_dir / ("eval_" + label + ".csv"));
      per << "fixture," << MetricsCsvHeader() << '\n';
      for (std::size_t i = 0; i < reports.size(); ++i) {
        per << i << ',' << MetricsCsvRow(reports[i]) << '\n';
      }
      const Aggregate agg = AggregateReports(reports);
      WriteAggregateCsv(agg, out_dir / ("eval_" + label + "_summary.csv"));
      PrintAggregate(label, agg);
    } else if (*compare) {
      const std::string dir = sweep_dir.empty() ? out_dir.string() : sweep_dir;
      const SweepResult sweep_result = ReadSweep(dir);
      CheckFixtureMatch(sweep_result.spec, fixture_seed, count);
      const auto fixtures = GenerateFixtures(fixture_seed, count, config);
      const Mlp policy = ReadPolicy(checkpoint);
      const Aggregate adaptive = EvaluatePolicy(policy, fixtures, config, g.jobs);
      const ComparisonReport report = Compare(sweep_result, adaptive);
      WriteComparisonCsv(report, (out_dir / "comparison.csv").string());
      for (const ComparisonRow& r : report.rows) {
        std::cout << r.metric << ": best fixed ";
        if (r.baseline) {
          std::cout << *r.baseline << " @ (" << r.baseline_gains.k_stanley << ", "
                    << r.baseline_gains.k_speed << ")";
        } else {
          std::cout << "absent";
        }
        std::cout << ", adaptive " << (r.adaptive ? std::to_string(*r.adaptive) : "absent")
                  << ", improvement "
                  << (r.improvement_pct ? std::to_string(*r.improvement_pct) + "%" : "n/a")
                  << '\n';
      }
      const ProbeResult probe = SlipResponseProbe(policy, fixtures, config);
      WriteProbeCsv(probe, (out_dir / "probe.csv").string());
      std::cout << "slip-response probe (fixture " << probe.fixture_id
                << "): K_stanley on patch " << probe.mean_k_on << " vs off patch "
                << probe.mean_k_off << " -> "
                << (probe.passed ? "PASS" : "FAIL (soft check, not fatal)") << '\n';
    } else if (*trace) {
      const auto fixtures = GenerateFixtures(fixture_seed, fixture_id + 1, config);
      const Fixture& f = fixtures.back();
      std::optional<Mlp> policy;
      GainFn source;
      if (!checkpoint.empty()) {
        policy = ReadPolicy(checkpoint);
        source = PolicyGains(*policy, {config.sac.action_low, config.sac.action_high});
      } else {
        source = FixedGains(gains.empty() ? Gains{} : ParseGains(gains));
      }
      const EpisodeTrace t = RunEpisode(f.trajectory, f.world, source, config);
      std::ofstream out = OpenOut(out_dir / ("trace_" + std::to_string(f.id) + ".jsonl"));
      WriteTraceJsonl(t, out);
      const MetricsReport m = ComputeMetrics(t, config.sac.gamma);
      std::cout << MetricsCsvHeader() << '\n' << MetricsCsvRow(m) << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid_argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
