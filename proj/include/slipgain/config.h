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

#ifndef SLIPGAIN_CONFIG_H_
#define SLIPGAIN_CONFIG_H_

#include <cstdint>
#include <string>

#include "slipgain/controllers.h"
#include "slipgain/metrics.h"
#include "slipgain/robot.h"
#include "slipgain/sac.h"
#include "slipgain/trajectory.h"
#include "slipgain/world.h"

namespace slipgain {

struct EpisodeConfig {
  double goal_tolerance = 0.1;
  int max_steps = 4000;
  double ds = kDefaultSpacing;
  double v_ref = kDefaultReferenceSpeed;

  void Validate() const;
};

struct TrainConfig {
  std::int64_t steps = 100000;
  std::int64_t eval_every = 5000;
  int eval_fixtures = 100;  // validation set, disjoint from the test fixtures
  // When > 0, rewards stored for learning are clamped to >= -reward_floor.
  // Evaluation always reports the unclamped reward.
  double reward_floor = 0.0;
};

struct Config {
  RobotParams robot;
  PredictiveConfig controller;
  RewardCoeffs reward;
  SacConfig sac;
  TrainConfig train;
  WorldConfig world;
  EpisodeConfig episode;

  void Validate() const;
};

// Reads an INI file with sections [robot], [controller], [reward], [sac],
// [world], [episode]. Every key is optional; unknown keys are rejected.
Config LoadConfig(const std::string& path);
Config ParseConfig(const std::string& text);

// Canonical key=value listing of every field, in a fixed order.
std::string CanonicalConfig(const Config& config);
// FNV-1a of the canonical listing.
std::uint64_t ConfigHash(const Config& config);

}  // namespace slipgain

#endif  // SLIPGAIN_CONFIG_H_
