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

#ifndef SLIPGAIN_EPISODE_H_
#define SLIPGAIN_EPISODE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "slipgain/config.h"
#include "slipgain/metrics.h"
#include "slipgain/mlp.h"
#include "slipgain/replay_buffer.h"
#include "slipgain/sac.h"
#include "slipgain/trajectory.h"
#include "slipgain/world.h"

namespace slipgain {

// A pre-generated (trajectory, friction map) pair.
struct Fixture {
  int id = 0;
  std::uint64_t seed = 0;
  ReferenceTrajectory trajectory;
  FrictionMap world;
};

// Deterministic per-index seed derived from a master seed (splitmix64).
std::uint64_t DeriveSeed(std::uint64_t master_seed, std::uint64_t index);

// Random 5-point spline plus a random map over its bounding box + margin.
Fixture GenerateFixture(std::uint64_t seed, int id, const Config& config);

// Fixtures 0..count-1 from `master_seed`.
std::vector<Fixture> GenerateFixtures(std::uint64_t master_seed, int count,
                                      const Config& config);

// Picks the gains for the next control step.
using GainFn = std::function<Gains(const TrackingObservation&)>;

GainFn FixedGains(Gains gains);
// Deterministic policy output. The network must outlive the returned function.
GainFn PolicyGains(const Mlp& policy, ActionBounds bounds);

// Called after every control step with (s_t, a_t, R_t, s_{t+1}, done).
// Returning false stops the episode early (reached_goal stays false).
using StepObserver =
    std::function<bool(const TrackingObservation& obs, const Gains& gains,
                       double reward, const TrackingObservation& next_obs,
                       bool done)>;

// Closed loop: project, observe, choose gains, predictive Stanley + speed P,
// body command, wheel command, slip model step, reward. Ends when the robot is
// within goal_tolerance of the final trajectory point or after max_steps.
// The robot starts at rest on the first sample, aligned with the path.
// Throws std::invalid_argument for an invalid configuration before stepping.
EpisodeTrace RunEpisode(const ReferenceTrajectory& trajectory,
                        const FrictionMap& world, const GainFn& gains,
                        const Config& config,
                        const StepObserver& observer = nullptr);

}  // namespace slipgain

#endif  // SLIPGAIN_EPISODE_H_
