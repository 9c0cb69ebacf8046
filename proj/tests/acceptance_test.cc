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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any hard criterion fails. Criterion 11 is reported but
// never fails the run.
//
// Usage: acceptance_test [--train-steps N] [--determinism-steps N]
//                        [--work-dir DIR]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slipgain/batch_eval.h"
#include "slipgain/config.h"
#include "slipgain/controllers.h"
#include "slipgain/episode.h"
#include "slipgain/experiments.h"
#include "slipgain/metrics.h"
#include "slipgain/mlp.h"
#include "slipgain/robot.h"
#include "slipgain/sac.h"

namespace slipgain {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int RunCli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(SLIPGAIN_CLI_PATH) + " " + args + " >> " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 1. Kinematics round trip.
Outcome KinematicsRoundTrip() {
  const auto start = Clock::now();
  const RobotParams params;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> v(-1.0, 1.0), w(-4.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const BodyCommand cmd{v(rng), w(rng)};
    const BodyCommand back = WheelsToBody(BodyToWheels(cmd, params), params);
    worst = std::max({worst, std::abs(back.v - cmd.v), std::abs(back.omega - cmd.omega)});
  }
  const double secs = Seconds(start);
  return {worst <= 1e-12 && secs < 1.0,
          "max error " + Fmt(worst) + " over 1e5 commands in " + Fmt(secs, 3) + " s"};
}

// 2. Controller formula oracles.
Outcome ControllerOracles() {
  const PredictiveConfig cfg;
  const RobotParams params;
  const double dmax = std::numbers::pi / 3.0;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> psi(-1.0, 1.0), e(-0.5, 0.5),
      v(0.0, 1.0), k(0.5, 5.0), acc(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double p = psi(rng), x = e(rng), s = v(rng), g = k(rng);
    const double nominal = p + std::atan(g * x / std::max(s, 0.05));
    const double hand = nominal > dmax ? dmax : (nominal < -dmax ? -dmax : nominal);
    worst = std::max(worst, std::abs(StanleyBasic(p, x, s, g, cfg) - hand));

    const double vref = v(rng);
    worst = std::max(worst, std::abs(SpeedP(vref, s, g) - g * (vref - s)));

    const double a = acc(rng), d = psi(rng);
    const BodyCommand body = SynthesizeBodyCommand(s, a, d, params);
    worst = std::max({worst, std::abs(body.v - (s + a * 0.05)),
                      std::abs(body.omega - d / 0.05)});
  }
  // Three regions of the clamp: inside, exactly at the bound, beyond it.
  bool regions = true;
  regions &= StanleyBasic(0.1, 0.0, 0.5, 2.5, cfg) == 0.1;
  regions &= StanleyBasic(dmax, 0.0, 0.5, 2.5, cfg) == dmax;
  regions &= StanleyBasic(-dmax, 0.0, 0.5, 2.5, cfg) == -dmax;
  regions &= StanleyBasic(dmax + 1e-9, 0.0, 0.5, 2.5, cfg) == dmax;
  regions &= StanleyBasic(1.5, 1.0, 0.1, 5.0, cfg) == dmax;
  regions &= StanleyBasic(-1.5, -1.0, 0.1, 5.0, cfg) == -dmax;
  regions &= std::abs(StanleyBasic(0.1, 0.2, 0.5, 2.5, cfg) -
                      (0.1 + std::numbers::pi / 4.0)) <= 1e-12;
  return {worst <= 1e-12 && regions,
          "max error " + Fmt(worst) + " over 1000 random inputs; clamp regions " +
              (regions ? "ok" : "WRONG")};
}

// 3. Predictive weight structure.
Outcome PredictiveWeights() {
  const PredictiveConfig cfg;
  const std::vector<double> w = PreviewWeights(cfg);
  // Powers of p1; 0.2 * 0.2 is not the double nearest 0.04, so the literal
  // values are compared to within one ulp-scale tolerance.
  const bool weights = w == std::vector<double>{1.0, 0.2, 0.2 * 0.2} &&
                       std::abs(w[1] - 0.2) <= 1e-15 &&
                       std::abs(w[2] - 0.04) <= 1e-15;
  const PreviewError now{0.07, -0.03};
  const double basic = StanleyNominal(now.psi, -now.e, 0.4, 2.0, cfg);
  const double forced = CombineStanleyTerms({now, now, now}, 0.4, 2.0, cfg);
  const double err = std::abs(forced - 1.24 * basic);
  return {weights && err <= 1e-12,
          "weights (" + Fmt(w[0]) + ", " + Fmt(w[1]) + ", " + Fmt(w[2]) +
              "); forced previews " + Fmt(forced, 12) + " vs 1.24 x basic " +
              Fmt(1.24 * basic, 12)};
}

// 4. Predictive Stanley tracks a two-corner path at least as well as basic.
Outcome PredictiveBeatsBasic() {
  const auto start = Clock::now();
  int wins = 0;
  std::ostringstream detail;
  for (int seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    const std::vector<Waypoint> wps{{0.0, 0.0},
                                    {1.5 + jitter(rng), jitter(rng)},
                                    {1.5 + jitter(rng), 1.5 + jitter(rng)},
                                    {3.0, 1.5}};
    const ReferenceTrajectory t = GenerateSpline(wps, kDefaultSpacing);
    Config config;
    config.world.low_fraction = 0.0;
    const FrictionMap world =
        GenerateWorld(rng, TrajectoryBounds(t, config.world.margin), config.world);
    const MetricsReport pred = ComputeMetrics(
        RunEpisode(t, world, FixedGains({2.5, 2.5}), config), config.sac.gamma);
    config.controller.predictive = false;
    const MetricsReport basic = ComputeMetrics(
        RunEpisode(t, world, FixedGains({2.5, 2.5}), config), config.sac.gamma);
    if (pred.avg_lat <= basic.avg_lat) ++wins;
    if (seed == 0) {
      detail << "seed 0: predictive " << Fmt(pred.avg_lat, 4) << " m vs basic "
             << Fmt(basic.avg_lat, 4) << " m; ";
    }
  }
  const double secs = Seconds(start);
  detail << wins << "/10 seeds ordered in " << Fmt(secs, 3) << " s";
  return {wins >= 9 && secs < 60.0, detail.str()};
}

StepRecord Record(double e, double dtheta, double dv, WheelCommand u, SlipSignals s) {
  StepRecord r;
  r.e = e;
  r.dtheta = dtheta;
  r.dv = dv;
  r.wheel_cmd = u;
  r.slip = s;
  r.reward = StepReward(e, dtheta, dv);
  return r;
}

// 5. Metrics on handcrafted traces.
Outcome MetricsOracle() {
  double worst = 0.0;
  auto check = [&](double got, double want) {
    worst = std::max(worst, std::abs(got - want));
  };
  EpisodeTrace a;
  a.records = {Record(0.1, 0, 0, {0, 0}, {}), Record(-0.2, 0, 0, {1, 1}, {}),
               Record(0.1, 0, 0, {1, -1}, {})};
  const MetricsReport ma = ComputeMetrics(a, 0.99);
  check(ma.avg_lat, 0.4 / 3.0);
  check(ma.e_max, 0.2);
  check(ma.avg_du, (std::sqrt(2.0) + 2.0) / 3.0);
  check(ma.avg_reward, (-0.2 - 0.8 - 0.2) / 3.0);
  check(ma.discounted_return, -0.2 - 0.99 * 0.8 - 0.99 * 0.99 * 0.2);
  bool ok = !ma.avg_lat_slip && ma.slip_step_count == 0;

  // Thresholds are strict: 0.7 m/s and 3 rad/s exactly do not count.
  EpisodeTrace b;
  b.records = {Record(0.1, 0.1, 0.2, {0, 0}, {0.7, 0.0}),
               Record(0.3, 0.0, -0.4, {3, 4}, {0.7000001, 0.0}),
               Record(-0.2, 0.2, 0.1, {3, 4}, {0.0, 3.0}),
               Record(0.5, 0.0, 0.3, {0, 0}, {0.0, -3.0000001}),
               Record(0.0, 0.0, 0.0, {0, 0}, {-0.7, -3.0})};
  const MetricsReport mb = ComputeMetrics(b, 0.99);
  ok = ok && mb.slip_step_count == 2 && mb.avg_lat_slip && mb.avg_dv_slip && mb.avg_du_slip;
  if (ok) {
    check(*mb.avg_lat_slip, (0.3 + 0.5) / 2.0);
    check(*mb.avg_dv_slip, (0.4 + 0.3) / 2.0);
    check(*mb.avg_du_slip, (5.0 + 5.0) / 2.0);
    check(mb.avg_lat, (0.1 + 0.3 + 0.2 + 0.5) / 5.0);
    check(mb.avg_dv, (0.2 + 0.4 + 0.1 + 0.3) / 5.0);
    check(mb.avg_du, 10.0 / 5.0);
    check(mb.e_max, 0.5);
  }
  return {ok && worst <= 1e-12,
          "max error " + Fmt(worst) + "; slip steps " + std::to_string(mb.slip_step_count) +
              " of 5 (expected 2)"};
}

// 6. Reward spot check.
Outcome RewardSpotCheck() {
  const double r = StepReward(0.1, 0.2, 0.3, RewardCoeffs{-20.0, -1.0, -1.0});
  return {std::abs(r + 0.33) <= 1e-12, "step_reward(0.1, 0.2, 0.3) = " + Fmt(r, 17)};
}

double RelativeError(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

// 7. Gradient checks on small random instances.
Outcome GradientCheck() {
  const auto start = Clock::now();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> width(3, 10), batch_size(2, 8);
  std::normal_distribution<double> normal(0.0, 1.0);
  const ActionBounds bounds;
  const double h = 1e-6;
  double worst_policy = 0.0, worst_critic = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    const int hidden = width(rng), batch = batch_size(rng);
    Mlp policy({5, hidden, hidden, 4}), q1({7, hidden, 1}), q2({7, hidden, 1});
    policy.Initialize(rng);
    q1.Initialize(rng);
    q2.Initialize(rng);
    Eigen::MatrixXd obs(5, batch), noise(2, batch), critic_in(7, batch);
    Eigen::VectorXd targets(batch);
    for (Eigen::Index i = 0; i < obs.size(); ++i) obs.data()[i] = normal(rng);
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = normal(rng);
    for (Eigen::Index i = 0; i < critic_in.size(); ++i) critic_in.data()[i] = normal(rng);
    for (Eigen::Index i = 0; i < targets.size(); ++i) targets[i] = normal(rng);
    const double alpha = 0.05 + 0.5 * std::abs(normal(rng));

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.num_params());
    PolicyLossAndGrad(policy, q1, q2, obs, noise, alpha, bounds, &grad);
    Eigen::VectorXd fd(policy.num_params());
    for (Eigen::Index i = 0; i < fd.size(); ++i) {
      Mlp p = policy, m = policy;
      p.mutable_params()[i] += h;
      m.mutable_params()[i] -= h;
      fd[i] = (PolicyLossAndGrad(p, q1, q2, obs, noise, alpha, bounds, nullptr).loss -
               PolicyLossAndGrad(m, q1, q2, obs, noise, alpha, bounds, nullptr).loss) /
              (2.0 * h);
    }
    worst_policy = std::max(worst_policy, RelativeError(grad, fd));

    Eigen::VectorXd cgrad = Eigen::VectorXd::Zero(q1.num_params());
    CriticLossAndGrad(q1, critic_in, targets, &cgrad);
    Eigen::VectorXd cfd(q1.num_params());
    for (Eigen::Index i = 0; i < cfd.size(); ++i) {
      Mlp p = q1, m = q1;
      p.mutable_params()[i] += h;
      m.mutable_params()[i] -= h;
      cfd[i] = (CriticLossAndGrad(p, critic_in, targets, nullptr) -
                CriticLossAndGrad(m, critic_in, targets, nullptr)) /
               (2.0 * h);
    }
    worst_critic = std::max(worst_critic, RelativeError(cgrad, cfd));
  }
  const double secs = Seconds(start);
  return {worst_policy <= 1e-4 && worst_critic <= 1e-4 && secs < 10.0,
          "worst relative error policy " + Fmt(worst_policy, 3) + ", critic " +
              Fmt(worst_critic, 3) + " over 20 instances in " + Fmt(secs, 3) + " s"};
}

struct SharedState {
  Config config;
  std::vector<Fixture> fixtures;
  SweepResult sweep;
  std::string trained_checkpoint;
  bool trained = false;
};

// 8. Full sweep shape and standalone cell reproduction.
Outcome SweepShape(SharedState& s, const fs::path& work) {
  const auto start = Clock::now();
  SweepSpec spec;
  s.sweep = RunSweep(spec, s.fixtures, s.config);
  const fs::path dir = work / "sweep";
  WriteSweep(s.sweep, dir.string());
  int files = 0;
  bool rows_ok = true;
  for (Metric m : kAllMetrics) {
    const fs::path p = dir / ("heatmap_" + std::string(MetricName(m)) + ".csv");
    if (!fs::exists(p)) continue;
    ++files;
    std::ifstream in(p);
    std::string line;
    int rows = -1;  // header
    while (std::getline(in, line)) ++rows;
    rows_ok &= rows == 100;
  }
  const double sweep_secs = Seconds(start);
  int mismatches = 0;
  for (const SweepCell& cell : s.sweep.cells) {
    const Aggregate alone = EvaluateFixedGains(cell.gains, s.fixtures, s.config, 1);
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
      if (alone.metrics[k].mean != cell.aggregate.metrics[k].mean) ++mismatches;
    }
  }
  return {files == 9 && rows_ok && mismatches == 0 && sweep_secs < 1800.0,
          std::to_string(files) + " heatmaps, 100 rows each: " + (rows_ok ? "yes" : "no") +
              "; all 100 cells re-run standalone, " + std::to_string(mismatches) +
              " mismatches; sweep took " + Fmt(sweep_secs, 3) + " s"};
}

// 9. Trained policy vs the best fixed-gain cell on the held-out fixtures.
Outcome AdaptiveVsFixed(SharedState& s, std::int64_t steps) {
  const auto start = Clock::now();
  Config config = s.config;
  config.train.steps = steps;
  const TrainResult result = Train(config, 0, [](const TrainingCurveRow& r) {
    std::cout << "  [train] step " << r.step << " episode " << r.episode
              << " validation r " << Fmt(r.eval_avg_reward) << " alpha "
              << Fmt(r.alpha, 3) << std::endl;
  });
  s.trained_checkpoint = result.best_checkpoint;
  s.trained = true;
  std::istringstream in(result.best_checkpoint);
  const Mlp policy = LoadPolicyFromCheckpoint(in);
  const Aggregate adaptive = EvaluatePolicy(policy, s.fixtures, s.config);
  const double r_adaptive = *adaptive[Metric::kAvgReward].mean;
  double r_best = -std::numeric_limits<double>::infinity();
  Gains best;
  for (const SweepCell& cell : s.sweep.cells) {
    const double r = *cell.aggregate[Metric::kAvgReward].mean;
    if (r > r_best) {
      r_best = r;
      best = cell.gains;
    }
  }
  const double secs = Seconds(start);
  const double pct = (r_adaptive - r_best) / std::abs(r_best) * 100.0;
  return {r_adaptive >= r_best && steps <= 300000 && secs < 7200.0,
          "adaptive r " + Fmt(r_adaptive) + " vs best fixed r " + Fmt(r_best) + " at (" +
              Fmt(best.k_stanley) + ", " + Fmt(best.k_speed) + "), " + Fmt(pct, 3) +
              "% (reference magnitude: 23.6% lower cost); " + std::to_string(steps) +
              " steps, " + Fmt(secs, 4) + " s"};
}

// 10. Determinism of train and eval/compare through the CLI.
Outcome Determinism(const fs::path& work, std::int64_t steps) {
  const fs::path log = work / "cli.log";
  const fs::path a = work / "det_a", b = work / "det_b";
  const std::string common = " --jobs 1 --seed 11 ";
  const std::string train = " train --steps " + std::to_string(steps) + " --eval-every " +
                            std::to_string(std::max<std::int64_t>(1, steps / 2));
  int rc = RunCli("--out-dir " + a.string() + common + train, log);
  rc |= RunCli("--out-dir " + b.string() + common + train, log);
  const bool same_final = rc == 0 && Slurp(a / "checkpoint_final.json") ==
                                         Slurp(b / "checkpoint_final.json");
  const bool same_best = rc == 0 && Slurp(a / "checkpoint_best.json") ==
                                        Slurp(b / "checkpoint_best.json");

  // eval/compare twice against the same sweep.
  const fs::path sweep = work / "det_sweep";
  const std::string count = " --count 20 ";
  rc |= RunCli("--out-dir " + sweep.string() + " --jobs 1 sweep" + count, log);
  const std::string ckpt = " --checkpoint " + (a / "checkpoint_final.json").string();
  const std::string compare =
      " compare" + count + ckpt + " --sweep-dir " + sweep.string();
  rc |= RunCli("--out-dir " + a.string() + " --jobs 1" + compare, log);
  rc |= RunCli("--out-dir " + b.string() + " --jobs 1" + compare, log);
  rc |= RunCli("--out-dir " + a.string() + " --jobs 1 eval" + count + ckpt + " --label det", log);
  rc |= RunCli("--out-dir " + b.string() + " --jobs 1 eval" + count + ckpt + " --label det", log);
  const std::string cmp_a = Slurp(a / "comparison.csv");
  const bool same_compare = rc == 0 && !cmp_a.empty() && cmp_a == Slurp(b / "comparison.csv");
  const bool same_eval = rc == 0 && Slurp(a / "eval_det.csv") == Slurp(b / "eval_det.csv");
  return {rc == 0 && same_final && same_best && same_compare && same_eval,
          std::string("exit codes ") + (rc == 0 ? "ok" : "NONZERO") +
              "; checkpoints identical: final " + (same_final ? "yes" : "no") + ", best " +
              (same_best ? "yes" : "no") + "; comparison.csv identical: " +
              (same_compare ? "yes" : "no") + "; eval csv identical: " +
              (same_eval ? "yes" : "no") + " (" + std::to_string(steps) + "-step runs)"};
}

// 11. Soft probe: lower K_stanley on the low-friction patch.
Outcome SlipProbe(const SharedState& s) {
  if (!s.trained) return {false, "no trained policy"};
  std::istringstream in(s.trained_checkpoint);
  const Mlp policy = LoadPolicyFromCheckpoint(in);
  const ProbeResult p = SlipResponseProbe(policy, s.fixtures, s.config);
  return {p.passed, "fixture " + std::to_string(p.fixture_id) + ": mean K_stanley on patch " +
                        Fmt(p.mean_k_on, 4) + " (" + std::to_string(p.on_patch_steps) +
                        " steps) vs off patch " + Fmt(p.mean_k_off, 4) + " (" +
                        std::to_string(p.off_patch_steps) + " steps)"};
}

}  // namespace
}  // namespace slipgain

int main(int argc, char** argv) {
  using namespace slipgain;
  const Config defaults;
  std::int64_t train_steps = defaults.train.steps;
  std::int64_t determinism_steps = 3000;
  fs::path work = fs::temp_directory_path() / "slipgain_acceptance";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--train-steps") {
      train_steps = std::stoll(argv[i + 1]);
    } else if (flag == "--determinism-steps") {
      determinism_steps = std::stoll(argv[i + 1]);
    } else if (flag == "--work-dir") {
      work = argv[i + 1];
    } else {
      std::cerr << "unknown flag " << flag << '\n';
      return 2;
    }
  }
  fs::remove_all(work);
  fs::create_directories(work);

  SharedState shared;
  shared.fixtures = GenerateFixtures(kDefaultFixtureSeed, kDefaultFixtureCount, shared.config);

  struct Criterion {
    int id;
    const char* name;
    bool soft;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "kinematics round trip", false, KinematicsRoundTrip},
      {2, "controller formula oracles", false, ControllerOracles},
      {3, "predictive weight structure", false, PredictiveWeights},
      {4, "predictive >= basic ordering", false, PredictiveBeatsBasic},
      {5, "metrics oracle", false, MetricsOracle},
      {6, "reward spot check", false, RewardSpotCheck},
      {7, "SAC gradient check", false, GradientCheck},
      {8, "sweep shape and cell reproduction", false,
       [&] { return SweepShape(shared, work); }},
      {9, "adaptive vs best fixed gains", false,
       [&] { return AdaptiveVsFixed(shared, train_steps); }},
      {10, "determinism", false, [&] { return Determinism(work, determinism_steps); }},
      {11, "slip-response probe (soft)", true, [&] { return SlipProbe(shared); }},
  };

  int hard_failures = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const char* verdict = out.pass ? "PASS" : (c.soft ? "FAIL (soft, not fatal)" : "FAIL");
    std::cout << verdict << " criterion " << c.id << ": " << c.name << " - " << out.detail
              << std::endl;
    if (!out.pass && !c.soft) ++hard_failures;
  }
  std::cout << (hard_failures == 0 ? "all hard criteria passed"
                                   : std::to_string(hard_failures) + " hard criteria failed")
            << std::endl;
  return hard_failures == 0 ? 0 : 1;
}
