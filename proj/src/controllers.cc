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

#include "slipgain/controllers.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slipgain/angles.h"

namespace slipgain {

void PredictiveConfig::Validate() const {
  if (n_previews < 1 || !(p1 > 0.0 && p1 < 1.0) || !(preview_dt > 0.0) ||
      !(delta_max > 0.0 && delta_max < std::numbers::pi) ||
      !(v_epsilon > 0.0)) {
    throw std::invalid_argument("invalid predictive controller config");
  }
}

double StanleyNominal(double psi, double cross_track, double v, double k,
                      const PredictiveConfig& cfg) {
  return psi + std::atan(k * cross_track / std::max(v, cfg.v_epsilon));
}

double StanleyBasic(double psi, double cross_track, double v, double k,
                    const PredictiveConfig& cfg) {
  return std::clamp(StanleyNominal(psi, cross_track, v, k, cfg),
                    -cfg.delta_max, cfg.delta_max);
}

std::vector<double> PreviewWeights(const PredictiveConfig& cfg) {
  std::vector<double> w(static_cast<std::size_t>(cfg.n_previews) + 1);
  w[0] = 1.0;
  w[1] = cfg.p1;
  for (std::size_t i = 2; i < w.size(); ++i) w[i] = w[i - 1] * w[i - 1];
  return w;
}

std::vector<PreviewError> PropagatePreviews(const RobotState& state,
                                            const ReferenceTrajectory& trajectory,
                                            double delta_current,
                                            const PredictiveConfig& cfg,
                                            const RobotParams& params) {
  const double omega = std::clamp(delta_current / params.control_period,
                                  -params.omega_max, params.omega_max);
  std::vector<PreviewError> out;
  out.reserve(cfg.n_previews);
  double x = state.x;
  double y = state.y;
  double yaw = state.yaw;
  for (int i = 0; i < cfg.n_previews; ++i) {
    x += state.v * std::cos(yaw) * cfg.preview_dt;
    y += state.v * std::sin(yaw) * cfg.preview_dt;
    yaw = WrapToPi(yaw + omega * cfg.preview_dt);
    const Projection p = Project(trajectory, x, y, yaw);
    out.push_back({p.heading_error, p.e});
  }
  return out;
}

double CombineStanleyTerms(const std::vector<PreviewError>& terms, double v,
                           double k, const PredictiveConfig& cfg) {
  const std::vector<double> weights = PreviewWeights(cfg);
  double sum = 0.0;
  for (std::size_t i = 0; i < terms.size() && i < weights.size(); ++i) {
    sum += weights[i] * StanleyNominal(terms[i].psi, -terms[i].e, v, k, cfg);
  }
  return std::clamp(sum, -cfg.delta_max, cfg.delta_max);
}

double StanleyPredictive(const RobotState& state,
                         const ReferenceTrajectory& trajectory, double v,
                         double k, const PredictiveConfig& cfg,
                         const RobotParams& params) {
  const Projection now = Project(trajectory, state.x, state.y, state.yaw);
  const double delta_now = StanleyBasic(now.heading_error, -now.e, v, k, cfg);
  if (!cfg.predictive) return delta_now;
  std::vector<PreviewError> terms{{now.heading_error, now.e}};
  const std::vector<PreviewError> previews =
      PropagatePreviews(state, trajectory, delta_now, cfg, params);
  terms.insert(terms.end(), previews.begin(), previews.end());
  return CombineStanleyTerms(terms, v, k, cfg);
}

double SpeedP(double v_ref, double v, double k_speed) {
  return k_speed * (v_ref - v);
}

BodyCommand SynthesizeBodyCommand(double v, double accel, double steer,
                                  const RobotParams& params) {
  return {v + accel * params.control_period, steer / params.control_period};
}

ControlOutput ComputeControl(const RobotState& state,
                             const ReferenceTrajectory& trajectory,
                             double v_ref, const Gains& gains,
                             const PredictiveConfig& cfg,
                             const RobotParams& params) {
  ControlOutput out;
  out.steer = StanleyPredictive(state, trajectory, state.v, gains.k_stanley,
                                cfg, params);
  out.accel = SpeedP(v_ref, state.v, gains.k_speed);
  return out;
}

}  // namespace slipgain
