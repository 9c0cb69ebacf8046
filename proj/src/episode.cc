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

#include "slipgain/episode.h"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "slipgain/controllers.h"
#include "slipgain/robot.h"

namespace slipgain {

namespace {

TrackingObservation Observe(const Projection& p, double v_ref,
                            const RobotState& state, const SlipSignals& slip) {
  return {p.e, p.heading_error, std::abs(v_ref) - std::abs(state.v), slip.dv,
          slip.dw};
}

void CheckGains(const Gains& g) {
  if (!(g.k_stanley >= kMinGain && g.k_stanley <= kMaxGain &&
        g.k_speed >= kMinGain && g.k_speed <= kMaxGain)) {
    throw std::invalid_argument("gains must lie in [0.5, 5.0]");
  }
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Fixture GenerateFixture(std::uint64_t seed, int id, const Config& config) {
  std::mt19937_64 rng(seed);
  const std::vector<Waypoint> waypoints = SampleRandomWaypoints(rng);
  ReferenceTrajectory trajectory =
      GenerateSpline(waypoints, config.episode.ds, config.episode.v_ref);
  FrictionMap world =
      GenerateWorld(rng, TrajectoryBounds(trajectory, config.world.margin),
                    config.world);
  return Fixture{id, seed, std::move(trajectory), std::move(world)};
}

std::vector<Fixture> GenerateFixtures(std::uint64_t master_seed, int count,
                                      const Config& config) {
  std::vector<Fixture> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(GenerateFixture(DeriveSeed(master_seed, i), i, config));
  }
  return out;
}

GainFn FixedGains(Gains gains) {
  CheckGains(gains);
  return [gains](const TrackingObservation&) { return gains; };
}

GainFn PolicyGains(const Mlp& policy, ActionBounds bounds) {
  return [&policy, bounds](const TrackingObservation& obs) {
    return ActDeterministic(policy, obs, bounds);
  };
}

EpisodeTrace RunEpisode(const ReferenceTrajectory& trajectory,
                        const FrictionMap& world, const GainFn& gains,
                        const Config& config, const StepObserver& observer) {
  config.robot.Validate();
  config.controller.Validate();
  config.episode.Validate();
  if (!gains) throw std::invalid_argument("episode: no gain source");

  const RobotParams& robot = config.robot;
  const ReferencePoint& start = trajectory.front();
  const ReferencePoint& goal = trajectory.back();
  RobotState state{start.x, start.y, start.yaw, 0.0, 0.0};
  SlipSignals slip;
  Projection proj = Project(trajectory, state.x, state.y, state.yaw);
  TrackingObservation obs =
      Observe(proj, trajectory[proj.index].v_ref, state, slip);

  EpisodeTrace trace;
  trace.records.reserve(512);
  for (int t = 0; t < config.episode.max_steps; ++t) {
    const Gains g = gains(obs);
    const double v_ref = trajectory[proj.index].v_ref;
    const ControlOutput ctrl =
        ComputeControl(state, trajectory, v_ref, g, config.controller, robot);
    const BodyCommand body =
        SynthesizeBodyCommand(state.v, ctrl.accel, ctrl.steer, robot);
    const WheelCommand wheels = BodyToWheels(body, robot);
    const double mu = world.MuAt(state.x, state.y);
    const StepResult next = Step(state, wheels, mu, robot);

    state = next.state;
    slip = next.slip;
    proj = Project(trajectory, state.x, state.y, state.yaw);
    const TrackingObservation next_obs =
        Observe(proj, trajectory[proj.index].v_ref, state, slip);
    const double reward =
        StepReward(next_obs.e, next_obs.dtheta, next_obs.dv, config.reward);
    const bool done = std::hypot(state.x - goal.x, state.y - goal.y) <=
                      config.episode.goal_tolerance;

    StepRecord rec;
    rec.t = t;
    rec.e = next_obs.e;
    rec.dtheta = next_obs.dtheta;
    rec.dv = next_obs.dv;
    rec.slip = slip;
    rec.wheel_cmd = wheels;
    rec.reward = reward;
    rec.gains = g;
    rec.mu = mu;
    rec.x = state.x;
    rec.y = state.y;
    trace.records.push_back(rec);

    const bool keep_going =
        !observer || observer(obs, g, reward, next_obs, done);
    obs = next_obs;
    if (done) {
      trace.reached_goal = true;
      break;
    }
    if (!keep_going) break;
  }
  return trace;
}

}  // namespace slipgain
