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

#ifndef SLIPGAIN_ROBOT_H_
#define SLIPGAIN_ROBOT_H_

namespace slipgain {

struct RobotParams {
  double wheel_radius = 0.033;
  double wheel_base = 0.287;
  double control_period = 0.05;
  double gravity = 9.81;
  // Scales the angular acceleration cap 2*mu*g/b.
  double traction_factor = 1.0;
  double v_max = 1.0;
  double omega_max = 4.0;

  // Throws std::invalid_argument unless every field is finite and positive.
  void Validate() const;
};

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double v = 0.0;
  double omega = 0.0;
};

struct WheelCommand {
  double left = 0.0;   // rad/s
  double right = 0.0;  // rad/s
};

struct BodyCommand {
  double v = 0.0;
  double omega = 0.0;
};

// Commanded-minus-achieved body velocities.
struct SlipSignals {
  double dv = 0.0;
  double dw = 0.0;
};

struct StepResult {
  RobotState state;
  SlipSignals slip;
};

BodyCommand WheelsToBody(const WheelCommand& cmd, const RobotParams& params);
WheelCommand BodyToWheels(const BodyCommand& cmd, const RobotParams& params);

// Advances the traction-limited slip model by one control period.
//
// The commanded body velocities are clamped to (v_max, omega_max), then the
// achieved velocities move towards them with accelerations capped at mu*g
// (linear) and traction_factor*2*mu*g/b (angular). The pose is integrated
// with the unicycle model at the new velocities. Throws std::invalid_argument
// on non-finite input or mu <= 0.
StepResult Step(const RobotState& state, const WheelCommand& cmd, double mu,
                const RobotParams& params);

SlipSignals ComputeSlipSignals(const WheelCommand& cmd, const RobotState& state,
                               const RobotParams& params);

}  // namespace slipgain

#endif  // SLIPGAIN_ROBOT_H_
