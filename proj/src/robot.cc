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

#include "slipgain/robot.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slipgain/angles.h"

namespace slipgain {

namespace {

bool Finite(const RobotState& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.yaw) &&
         std::isfinite(s.v) && std::isfinite(s.omega);
}

}  // namespace

void RobotParams::Validate() const {
  for (double field : {wheel_radius, wheel_base, control_period, gravity,
                       traction_factor, v_max, omega_max}) {
    if (!(std::isfinite(field) && field > 0.0)) {
      throw std::invalid_argument("robot params must be finite and positive");
    }
  }
}

BodyCommand WheelsToBody(const WheelCommand& cmd, const RobotParams& params) {
  return {(cmd.right + cmd.left) * params.wheel_radius / 2.0,
          (cmd.right - cmd.left) * params.wheel_radius / params.wheel_base};
}

WheelCommand BodyToWheels(const BodyCommand& cmd, const RobotParams& params) {
  const double spin = cmd.omega * params.wheel_base;
  return {(2.0 * cmd.v - spin) / (2.0 * params.wheel_radius),
          (2.0 * cmd.v + spin) / (2.0 * params.wheel_radius)};
}

StepResult Step(const RobotState& state, const WheelCommand& cmd, double mu,
                const RobotParams& params) {
  if (!Finite(state) || !std::isfinite(cmd.left) ||
      !std::isfinite(cmd.right) || !std::isfinite(mu)) {
    throw std::invalid_argument("robot step: non-finite input");
  }
  if (!(mu > 0.0)) {
    throw std::invalid_argument("robot step: friction must be positive");
  }
  const BodyCommand desired = WheelsToBody(cmd, params);
  const double v_d = std::clamp(desired.v, -params.v_max, params.v_max);
  const double w_d =
      std::clamp(desired.omega, -params.omega_max, params.omega_max);

  const double dt = params.control_period;
  const double dv_cap = mu * params.gravity * dt;
  const double dw_cap = params.traction_factor * 2.0 * mu * params.gravity /
                        params.wheel_base * dt;

  StepResult out;
  RobotState& next = out.state;
  next.v = state.v + std::clamp(v_d - state.v, -dv_cap, dv_cap);
  next.omega = state.omega + std::clamp(w_d - state.omega, -dw_cap, dw_cap);
  next.x = state.x + next.v * std::cos(state.yaw) * dt;
  next.y = state.y + next.v * std::sin(state.yaw) * dt;
  next.yaw = WrapToPi(state.yaw + next.omega * dt);
  out.slip = {v_d - next.v, w_d - next.omega};
  return out;
}

SlipSignals ComputeSlipSignals(const WheelCommand& cmd, const RobotState& state,
                               const RobotParams& params) {
  const BodyCommand body = WheelsToBody(cmd, params);
  return {body.v - state.v, body.omega - state.omega};
}

}  // namespace slipgain
