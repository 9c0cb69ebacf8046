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

#include "slipgain/experiments.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "slipgain/batch_eval.h"
#include "slipgain/sac.h"

namespace slipgain {

namespace {

constexpr std::uint64_t kValidationStream = 0x5EED0001;
constexpr std::uint64_t kTrainingStream = 0x5EED0002;

std::string Num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string Num(const std::optional<double>& v) { return v ? Num(*v) : ""; }

std::optional<double> ParseOptional(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return std::stod(cell);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::string Serialize(const SacAgent& agent, std::uint64_t hash) {
  std::ostringstream os;
  agent.SaveCheckpoint(os, hash);
  return os.str();
}

struct CostRow {
  const char* name;
  Metric metric;
  double sign;
};

constexpr std::array<CostRow, 8> kComparisonRows = {{
    {"neg_avg_reward", Metric::kAvgReward, -1.0},
    {"avg_lat", Metric::kAvgLat, 1.0},
    {"avg_dv", Metric::kAvgDv, 1.0},
    {"avg_du", Metric::kAvgDu, 1.0},
    {"e_max", Metric::kEMax, 1.0},
    {"avg_lat_slip", Metric::kAvgLatSlip, 1.0},
    {"avg_dv_slip", Metric::kAvgDvSlip, 1.0},
    {"avg_du_slip", Metric::kAvgDuSlip, 1.0},
}};

}  // namespace

std::string_view MetricName(Metric m) {
  switch (m) {
    case Metric::kAvgReward: return "avg_reward";
    case Metric::kAvgLat: return "avg_lat";
    case Metric::kAvgDv: return "avg_dv";
    case Metric::kAvgDu: return "avg_du";
    case Metric::kEMax: return "e_max";
    case Metric::kAvgLatSlip: return "avg_lat_slip";
    case Metric::kAvgDvSlip: return "avg_dv_slip";
    case Metric::kAvgDuSlip: return "avg_du_slip";
    case Metric::kReturn: return "return";
  }
  return "unknown";
}

std::optional<double> MetricValue(const MetricsReport& r, Metric m) {
  switch (m) {
    case Metric::kAvgReward: return r.avg_reward;
    case Metric::kAvgLat: return r.avg_lat;
    case Metric::kAvgDv: return r.avg_dv;
    case Metric::kAvgDu: return r.avg_du;
    case Metric::kEMax: return r.e_max;
    case Metric::kAvgLatSlip: return r.avg_lat_slip;
    case Metric::kAvgDvSlip: return r.avg_dv_slip;
    case Metric::kAvgDuSlip: return r.avg_du_slip;
    case Metric::kReturn: return r.discounted_return;
  }
  return std::nullopt;
}

Aggregate AggregateReports(std::span<const MetricsReport> reports) {
  Aggregate agg;
  agg.episodes = static_cast<int>(reports.size());
  int reached = 0;
  for (const MetricsReport& r : reports) reached += r.reached_goal ? 1 : 0;
  agg.reach_rate = reports.empty() ? 0.0 : static_cast<double>(reached) / reports.size();
  for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
    double sum = 0.0;
    int count = 0;
    for (const MetricsReport& r : reports) {
      if (auto v = MetricValue(r, kAllMetrics[k])) {
        sum += *v;
        ++count;
      }
    }
    MetricSummary& s = agg.metrics[k];
    s.count = count;
    if (count == 0) continue;
    const double mean = sum / count;
    double var = 0.0;
    for (const MetricsReport& r : reports) {
      if (auto v = MetricValue(r, kAllMetrics[k])) var += (*v - mean) * (*v - mean);
    }
    s.mean = mean;
    s.stddev = std::sqrt(var / count);
  }
  return agg;
}

std::vector<double> DefaultGainGrid() {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(0.5 * i);
  return grid;
}

SweepResult RunSweep(const SweepSpec& spec, std::span<const Fixture> fixtures,
                     const Config& config, int threads) {
  if (spec.k_values.empty()) throw std::invalid_argument("sweep: empty grid");
  if (static_cast<int>(fixtures.size()) != spec.n_fixtures) {
    throw std::invalid_argument("sweep: fixture count does not match spec");
  }
  std::vector<EpisodeJob> jobs;
  for (double ks : spec.k_values) {
    for (double kv : spec.k_values) {
      for (std::size_t f = 0; f < fixtures.size(); ++f) {
        jobs.push_back({f, {ks, kv}, nullptr});
      }
    }
  }
  const std::vector<MetricsReport> reports =
      EvaluateEpisodes(jobs, fixtures, config, threads);
  SweepResult result;
  result.spec = spec;
  result.config_hash = ConfigHash(config);
  const std::size_t per_cell = fixtures.size();
  for (std::size_t c = 0; c * per_cell < reports.size(); ++c) {
    std::span<const MetricsReport> slice(reports.data() + c * per_cell,
                                         per_cell);
    result.cells.push_back({jobs[c * per_cell].gains, AggregateReports(slice)});
  }
  return result;
}

Aggregate EvaluateFixedGains(const Gains& gains,
                             std::span<const Fixture> fixtures,
                             const Config& config, int threads) {
  std::vector<EpisodeJob> jobs;
  for (std::size_t f = 0; f < fixtures.size(); ++f) jobs.push_back({f, gains, nullptr});
  const auto reports = EvaluateEpisodes(jobs, fixtures, config, threads);
  return AggregateReports(reports);
}

Aggregate EvaluatePolicy(const Mlp& policy, std::span<const Fixture> fixtures,
                         const Config& config, int threads) {
  std::vector<EpisodeJob> jobs;
  for (std::size_t f = 0; f < fixtures.size(); ++f) jobs.push_back({f, {}, &policy});
  const auto reports = EvaluateEpisodes(jobs, fixtures, config, threads);
  return AggregateReports(reports);
}

void WriteSweep(const SweepResult& sweep, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
    const std::string name(MetricName(kAllMetrics[k]));
    std::ofstream out = OpenOut(dir + "/heatmap_" + name + ".csv");
    out << "k_stanley,k_speed,value\n";
    for (const SweepCell& c : sweep.cells) {
      out << Num(c.gains.k_stanley) << ',' << Num(c.gains.k_speed) << ','
          << Num(c.aggregate.metrics[k].mean) << '\n';
    }
  }

  std::ofstream summary = OpenOut(dir + "/sweep_summary.csv");
  summary << "k_stanley,k_speed,reach_rate,episodes";
  for (Metric m : kAllMetrics) {
    const std::string name(MetricName(m));
    summary << ',' << name << "_mean," << name << "_std," << name << "_count";
  }
  summary << '\n';
  for (const SweepCell& c : sweep.cells) {
    summary << Num(c.gains.k_stanley) << ',' << Num(c.gains.k_speed) << ','
            << Num(c.aggregate.reach_rate) << ',' << c.aggregate.episodes;
    for (const MetricSummary& s : c.aggregate.metrics) {
      summary << ',' << Num(s.mean) << ',' << Num(s.stddev) << ',' << s.count;
    }
    summary << '\n';
  }

  nlohmann::ordered_json meta;
  meta["master_seed"] = sweep.spec.master_seed;
  meta["n_fixtures"] = sweep.spec.n_fixtures;
  meta["k_values"] = sweep.spec.k_values;
  meta["config_hash"] = sweep.config_hash;
  OpenOut(dir + "/sweep_meta.json") << meta.dump(2) << '\n';
}

SweepResult ReadSweep(const std::string& dir) {
  std::ifstream meta_in(dir + "/sweep_meta.json");
  if (!meta_in) throw std::invalid_argument("sweep: missing " + dir + "/sweep_meta.json");
  const nlohmann::json meta = nlohmann::json::parse(meta_in);
  SweepResult result;
  result.spec.master_seed = meta.at("master_seed").get<std::uint64_t>();
  result.spec.n_fixtures = meta.at("n_fixtures").get<int>();
  result.spec.k_values = meta.at("k_values").get<std::vector<double>>();
  result.config_hash = meta.at("config_hash").get<std::uint64_t>();

  std::ifstream in(dir + "/sweep_summary.csv");
  if (!in) throw std::invalid_argument("sweep: missing " + dir + "/sweep_summary.csv");
  std::string line;
  std::getline(in, line);
  const std::size_t expected = 4 + 3 * kAllMetrics.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsv(line);
    if (f.size() != expected) throw std::invalid_argument("sweep: malformed row: " + line);
    SweepCell cell;
    cell.gains = {std::stod(f[0]), std::stod(f[1])};
    cell.aggregate.reach_rate = std::stod(f[2]);
    cell.aggregate.episodes = std::stoi(f[3]);
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
      MetricSummary& s = cell.aggregate.metrics[k];
      s.mean = ParseOptional(f[4 + 3 * k]);
      s.stddev = std::stod(f[5 + 3 * k]);
      s.count = std::stoi(f[6 + 3 * k]);
    }
    result.cells.push_back(cell);
  }
  if (result.cells.size() != result.spec.k_values.size() * result.spec.k_values.size()) {
    throw std::invalid_argument("sweep: cell count does not match grid");
  }
  return result;
}

void CheckFixtureMatch(const SweepSpec& spec, std::uint64_t master_seed,
                       int n_fixtures) {
  if (spec.master_seed != master_seed || spec.n_fixtures != n_fixtures) {
    std::ostringstream os;
    os << "fixture mismatch: sweep used seed " << spec.master_seed << " x "
       << spec.n_fixtures << ", evaluation uses seed " << master_seed << " x "
       << n_fixtures;
    throw std::invalid_argument(os.str());
  }
}

ComparisonReport Compare(const SweepResult& sweep, const Aggregate& adaptive) {
  if (sweep.cells.empty()) throw std::invalid_argument("compare: empty sweep");
  ComparisonReport report;
  report.adaptive_reach_rate = adaptive.reach_rate;
  for (const CostRow& spec : kComparisonRows) {
    ComparisonRow row;
    row.metric = spec.name;
    for (const SweepCell& cell : sweep.cells) {
      const MetricSummary& s = cell.aggregate[spec.metric];
      if (!s.mean) continue;
      const double cost = spec.sign * *s.mean;
      if (!row.baseline || cost < *row.baseline) {
        row.baseline = cost;
        row.baseline_std = s.stddev;
        row.baseline_gains = cell.gains;
      }
    }
    const MetricSummary& a = adaptive[spec.metric];
    if (a.mean) {
      row.adaptive = spec.sign * *a.mean;
      row.adaptive_std = a.stddev;
    }
    if (row.baseline && row.adaptive && *row.baseline != 0.0) {
      row.improvement_pct = (*row.baseline - *row.adaptive) / *row.baseline * 100.0;
    }
    report.rows.push_back(row);
  }
  return report;
}

void WriteComparisonCsv(const ComparisonReport& report, const std::string& path) {
  std::ofstream out = OpenOut(path);
  out << "metric,baseline,baseline_std,best_k_stanley,best_k_speed,adaptive,"
         "adaptive_std,improvement_pct\n";
  for (const ComparisonRow& r : report.rows) {
    out << r.metric << ',' << Num(r.baseline) << ',' << Num(r.baseline_std)
        << ',' << Num(r.baseline_gains.k_stanley) << ','
        << Num(r.baseline_gains.k_speed) << ',' << Num(r.adaptive) << ','
        << Num(r.adaptive_std) << ',' << Num(r.improvement_pct) << '\n';
  }
}

ProbeResult SlipResponseProbe(const Mlp& policy,
                              std::span<const Fixture> fixtures,
                              const Config& config) {
  ProbeResult probe;
  int best_count = 0;
  const Fixture* chosen = nullptr;
  for (const Fixture& f : fixtures) {
    int count = 0;
    for (const ReferencePoint& p : f.trajectory.points()) {
      count += f.world.MuAt(p.x, p.y) == f.world.mu_low() ? 1 : 0;
    }
    if (count > best_count) {
      best_count = count;
      chosen = &f;
    }
  }
  if (!chosen) return probe;
  probe.fixture_id = chosen->id;
  const EpisodeTrace trace =
      RunEpisode(chosen->trajectory, chosen->world,
                 PolicyGains(policy, {config.sac.action_low, config.sac.action_high}),
                 config);
  double sum_on = 0.0, sum_off = 0.0;
  for (const StepRecord& r : trace.records) {
    if (r.mu == chosen->world.mu_low()) {
      ++probe.on_patch_steps;
      sum_on += r.gains.k_stanley;
    } else {
      ++probe.off_patch_steps;
      sum_off += r.gains.k_stanley;
    }
  }
  probe.applicable = probe.on_patch_steps > 0 && probe.off_patch_steps > 0;
  if (probe.on_patch_steps > 0) probe.mean_k_on = sum_on / probe.on_patch_steps;
  if (probe.off_patch_steps > 0) probe.mean_k_off = sum_off / probe.off_patch_steps;
  probe.passed = probe.applicable && probe.mean_k_on < probe.mean_k_off;
  return probe;
}

void WriteProbeCsv(const ProbeResult& p, const std::string& path) {
  std::ofstream out = OpenOut(path);
  out << "fixture,on_patch_steps,off_patch_steps,mean_k_stanley_on,"
         "mean_k_stanley_off,applicable,passed\n";
  out << p.fixture_id << ',' << p.on_patch_steps << ',' << p.off_patch_steps
      << ',' << Num(p.mean_k_on) << ',' << Num(p.mean_k_off) << ','
      << (p.applicable ? 1 : 0) << ',' << (p.passed ? 1 : 0) << '\n';
}

TrainResult Train(const Config& config, std::uint64_t seed,
                  const std::function<void(const TrainingCurveRow&)>& progress) {
  config.Validate();
  const std::uint64_t hash = ConfigHash(config);
  SacAgent agent(config.sac, seed);
  const std::vector<Fixture> validation = GenerateFixtures(
      DeriveSeed(seed, kValidationStream), config.train.eval_fixtures, config);
  const std::uint64_t training_master = DeriveSeed(seed, kTrainingStream);

  TrainResult result;
  int episode = 0;
  UpdateReport last;
  auto evaluate = [&]() {
    const Aggregate agg = EvaluatePolicy(agent.policy(), validation, config);
    TrainingCurveRow row;
    row.step = agent.env_steps();
    row.episode = episode;
    row.eval_avg_reward = agg[Metric::kAvgReward].mean.value_or(0.0);
    row.critic_loss = 0.5 * (last.critic1_loss + last.critic2_loss);
    row.policy_loss = last.policy_loss;
    row.alpha = agent.alpha();
    result.curve.push_back(row);
    if (result.best_checkpoint.empty() ||
        row.eval_avg_reward > result.best_eval_avg_reward) {
      result.best_eval_avg_reward = row.eval_avg_reward;
      result.best_checkpoint = Serialize(agent, hash);
    }
    if (progress) progress(row);
  };

  evaluate();
  const std::int64_t total = config.train.steps;
  while (agent.env_steps() < total) {
    const Fixture fixture = GenerateFixture(
        DeriveSeed(training_master, static_cast<std::uint64_t>(episode)),
        episode, config);
    PolicySample pending;
    const GainFn explore = [&](const TrackingObservation& obs) {
      pending = static_cast<std::size_t>(agent.env_steps()) < config.sac.warmup_steps
                    ? agent.RandomAction()
                    : agent.Sample(obs);
      return pending.gains;
    };
    const StepObserver learn = [&](const TrackingObservation& obs,
                                   const Gains& gains, double reward,
                                   const TrackingObservation& next_obs,
                                   bool done) {
      const double stored = config.train.reward_floor > 0.0
                                ? std::max(reward, -config.train.reward_floor)
                                : reward;
      agent.Observe({obs, gains, pending.pre_squash, stored, next_obs, done});
      if (agent.env_steps() % config.sac.update_every == 0) {
        const UpdateReport report = agent.Update();
        if (report.ready) last = report;
      }
      if (agent.env_steps() % config.train.eval_every == 0) evaluate();
      return agent.env_steps() < total;
    };
    RunEpisode(fixture.trajectory, fixture.world, explore, config, learn);
    ++episode;
  }
  if (result.curve.back().step != agent.env_steps()) evaluate();
  result.final_checkpoint = Serialize(agent, hash);
  return result;
}

void WriteTrainingCurve(std::span<const TrainingCurveRow> curve,
                        const std::string& path) {
  std::ofstream out = OpenOut(path);
  out << "step,episode,eval_avg_reward,critic_loss,policy_loss,alpha\n";
  for (const TrainingCurveRow& r : curve) {
    out << r.step << ',' << r.episode << ',' << Num(r.eval_avg_reward) << ','
        << Num(r.critic_loss) << ',' << Num(r.policy_loss) << ','
        << Num(r.alpha) << '\n';
  }
}

}  // namespace slipgain
