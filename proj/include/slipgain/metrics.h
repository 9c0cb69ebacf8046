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

#ifndef SLIPGAIN_METRICS_H_
#define SLIPGAIN_METRICS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slipgain/controllers.h"
#include "slipgain/robot.h"

namespace slipgain {

struct RewardCoeffs {
  double r_dist = -20.0;
  double r_ang = -1.0;
  double r_speed = -1.0;
};

inline constexpr double kSlipSpeedThreshold = 0.7;  // m/s
inline constexpr double kSlipYawRateThreshold = 3.0;  // rad/s

struct StepRecord {
  int t = 0;
  double e = 0.0;
  double dtheta = 0.0;
  double dv = 0.0;  // |v_ref| - |v|, signed
  SlipSignals slip;
  WheelCommand wheel_cmd;
  double reward = 0.0;
  // Diagnostics beyond the reward terms.
  Gains gains;
  double mu = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct EpisodeTrace {
  std::vector<StepRecord> records;
  bool reached_goal = false;

  int t_traj() const { return static_cast<int>(records.size()); }
};

struct MetricsReport {
  double avg_reward = 0.0;
  double avg_lat = 0.0;
  double avg_dv = 0.0;
  double avg_du = 0.0;
  double e_max = 0.0;
  // Absent when no step was slipping.
  std::optional<double> avg_lat_slip;
  std::optional<double> avg_dv_slip;
  std::optional<double> avg_du_slip;
  int slip_step_count = 0;
  double discounted_return = 0.0;
  bool reached_goal = false;
  int steps = 0;
};

double StepReward(double e, double dtheta, double dv,
                  const RewardCoeffs& coeffs = {});

// |dv| > 0.7 m/s or |dw| > 3 rad/s, strictly.
bool IsSlipping(const SlipSignals& s);

// Long-term averages divide by the trace length; command-change terms are
// ||u_i - u_{i-1}|| for i >= 1. Slip-filtered averages divide by the number of
// slipping steps. Throws std::invalid_argument on an empty trace.
MetricsReport ComputeMetrics(const EpisodeTrace& trace, double gamma);

// One StepRecord per line, snake_case keys.
void WriteTraceJsonl(const EpisodeTrace& trace, std::ostream& out);
EpisodeTrace ReadTraceJsonl(std::istream& in);

// Fixed-order CSV row for a report; the header is emitted separately.
std::string MetricsCsvHeader();
std::string MetricsCsvRow(const MetricsReport& report);

}  // namespace slipgain

#endif  // SLIPGAIN_METRICS_H_
