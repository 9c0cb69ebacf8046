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

#ifndef SLIPGAIN_CONTROLLERS_H_
#define SLIPGAIN_CONTROLLERS_H_

#include <numbers>
#include <vector>

#include "slipgain/robot.h"
#include "slipgain/trajectory.h"

namespace slipgain {

inline constexpr double kMinGain = 0.5;
inline constexpr double kMaxGain = 5.0;

struct Gains {
  double k_stanley = 2.5;
  double k_speed = 2.5;  // 1/s
};

struct PredictiveConfig {
  int n_previews = 2;
  double p1 = 0.2;
  double preview_dt = 0.05;  // one control period
  double delta_max = std::numbers::pi / 3.0;
  double v_epsilon = 0.05;
  // When false the lateral controller uses only the current projection.
  bool predictive = true;

  void Validate() const;
};

struct ControlOutput {
  double steer = 0.0;  // delta, rad
  double accel = 0.0;  // alpha, m/s^2
};

// Lateral error seen by a preview point.
struct PreviewError {
  double psi = 0.0;
  double e = 0.0;  // projection sign convention: positive left of path
};

// Stanley steering law with saturation at +-delta_max.
//
// `cross_track` is positive when the robot is to the RIGHT of the path, so a
// positive result turns the robot left (counter-clockwise). Callers holding a
// projection pass -projection.e.
double StanleyBasic(double psi, double cross_track, double v, double k,
                    const PredictiveConfig& cfg);

// psi + atan(k * cross_track / max(v, v_epsilon)), without saturation.
double StanleyNominal(double psi, double cross_track, double v, double k,
                      const PredictiveConfig& cfg);

// (p_0, ..., p_N) with p_0 = 1, p_1 from the config and p_i = p_{i-1}^2.
std::vector<double> PreviewWeights(const PredictiveConfig& cfg);

// Rolls the unicycle forward N times by preview_dt at the current speed and a
// heading rate of delta_current / control_period (clamped to omega_max), and
// projects each predicted pose onto the trajectory.
std::vector<PreviewError> PropagatePreviews(const RobotState& state,
                                            const ReferenceTrajectory& trajectory,
                                            double delta_current,
                                            const PredictiveConfig& cfg,
                                            const RobotParams& params);

// Weighted sum of Stanley terms over `terms` (current first, then previews),
// clamped to +-delta_max.
double CombineStanleyTerms(const std::vector<PreviewError>& terms, double v,
                           double k, const PredictiveConfig& cfg);

double StanleyPredictive(const RobotState& state,
                         const ReferenceTrajectory& trajectory, double v,
                         double k, const PredictiveConfig& cfg,
                         const RobotParams& params);

// alpha = k_speed * (v_ref - v).
double SpeedP(double v_ref, double v, double k_speed);

// v_cmd = v + alpha * dT, omega_cmd = delta / dT.
BodyCommand SynthesizeBodyCommand(double v, double accel, double steer,
                                  const RobotParams& params);

// Full lateral + longitudinal step for a given pose and gains.
ControlOutput ComputeControl(const RobotState& state,
                             const ReferenceTrajectory& trajectory,
                             double v_ref, const Gains& gains,
                             const PredictiveConfig& cfg,
                             const RobotParams& params);

}  // namespace slipgain

#endif  // SLIPGAIN_CONTROLLERS_H_
