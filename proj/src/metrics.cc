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

#include "slipgain/metrics.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace slipgain {

namespace {

double CommandChange(const WheelCommand& a, const WheelCommand& b) {
  return std::hypot(b.left - a.left, b.right - a.right);
}

std::string OptionalCell(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

}  // namespace

double StepReward(double e, double dtheta, double dv,
                  const RewardCoeffs& coeffs) {
  return coeffs.r_dist * e * e + coeffs.r_ang * dtheta * dtheta +
         coeffs.r_speed * dv * dv;
}

bool IsSlipping(const SlipSignals& s) {
  return std::abs(s.dv) > kSlipSpeedThreshold ||
         std::abs(s.dw) > kSlipYawRateThreshold;
}

MetricsReport ComputeMetrics(const EpisodeTrace& trace, double gamma) {
  if (trace.records.empty()) {
    throw std::invalid_argument("metrics: empty trace");
  }
  const auto& recs = trace.records;
  const double t_traj = static_cast<double>(recs.size());

  MetricsReport m;
  m.reached_goal = trace.reached_goal;
  m.steps = static_cast<int>(recs.size());
  double sum_reward = 0.0, sum_lat = 0.0, sum_dv = 0.0, sum_du = 0.0;
  double slip_lat = 0.0, slip_dv = 0.0, slip_du = 0.0;
  double discount = 1.0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const StepRecord& r = recs[i];
    const double du = i > 0 ? CommandChange(recs[i - 1].wheel_cmd, r.wheel_cmd)
                            : 0.0;
    sum_reward += r.reward;
    sum_lat += std::abs(r.e);
    sum_dv += std::abs(r.dv);
    sum_du += du;
    m.e_max = std::max(m.e_max, std::abs(r.e));
    m.discounted_return += discount * r.reward;
    discount *= gamma;
    if (IsSlipping(r.slip)) {
      ++m.slip_step_count;
      slip_lat += std::abs(r.e);
      slip_dv += std::abs(r.dv);
      slip_du += du;
    }
  }
  m.avg_reward = sum_reward / t_traj;
  m.avg_lat = sum_lat / t_traj;
  m.avg_dv = sum_dv / t_traj;
  m.avg_du = sum_du / t_traj;
  if (m.slip_step_count > 0) {
    const double t_slip = m.slip_step_count;
    m.avg_lat_slip = slip_lat / t_slip;
    m.avg_dv_slip = slip_dv / t_slip;
    m.avg_du_slip = slip_du / t_slip;
  }
  return m;
}

void WriteTraceJsonl(const EpisodeTrace& trace, std::ostream& out) {
  for (const StepRecord& r : trace.records) {
    nlohmann::ordered_json j;
    j["t"] = r.t;
    j["e"] = r.e;
    j["dtheta"] = r.dtheta;
    j["dv"] = r.dv;
    j["slip_dv"] = r.slip.dv;
    j["slip_dw"] = r.slip.dw;
    j["omega_left"] = r.wheel_cmd.left;
    j["omega_right"] = r.wheel_cmd.right;
    j["reward"] = r.reward;
    j["k_stanley"] = r.gains.k_stanley;
    j["k_speed"] = r.gains.k_speed;
    j["mu"] = r.mu;
    j["x"] = r.x;
    j["y"] = r.y;
    j["reached_goal"] = trace.reached_goal;
    out << j.dump() << '\n';
  }
}

EpisodeTrace ReadTraceJsonl(std::istream& in) {
  EpisodeTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    StepRecord r;
    r.t = j.at("t").get<int>();
    r.e = j.at("e").get<double>();
    r.dtheta = j.at("dtheta").get<double>();
    r.dv = j.at("dv").get<double>();
    r.slip = {j.at("slip_dv").get<double>(), j.at("slip_dw").get<double>()};
    r.wheel_cmd = {j.at("omega_left").get<double>(),
                   j.at("omega_right").get<double>()};
    r.reward = j.at("reward").get<double>();
    r.gains = {j.value("k_stanley", 0.0), j.value("k_speed", 0.0)};
    r.mu = j.value("mu", 0.0);
    r.x = j.value("x", 0.0);
    r.y = j.value("y", 0.0);
    trace.reached_goal = j.value("reached_goal", false);
    trace.records.push_back(r);
  }
  return trace;
}

std::string MetricsCsvHeader() {
  return "avg_reward,avg_lat,avg_dv,avg_du,e_max,avg_lat_slip,avg_dv_slip,"
         "avg_du_slip,slip_steps,discounted_return,reached_goal,steps";
}

std::string MetricsCsvRow(const MetricsReport& m) {
  std::ostringstream os;
  os.precision(17);
  os << m.avg_reward << ',' << m.avg_lat << ',' << m.avg_dv << ',' << m.avg_du
     << ',' << m.e_max << ',' << OptionalCell(m.avg_lat_slip) << ','
     << OptionalCell(m.avg_dv_slip) << ',' << OptionalCell(m.avg_du_slip)
     << ',' << m.slip_step_count << ',' << m.discounted_return << ','
     << (m.reached_goal ? 1 : 0) << ',' << m.steps;
  return os.str();
}

}  // namespace slipgain
