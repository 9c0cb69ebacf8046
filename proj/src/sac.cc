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

#include "slipgain/sac.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <utility>

#include "json.hpp"

namespace slipgain {

namespace {

constexpr int kCheckpointVersion = 1;
const double kHalfLogTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

std::vector<int> NetworkSizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

// Outputs of the policy head for a batch.
struct PolicyForward {
  Mlp::Cache cache;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_std;
  Eigen::MatrixXd log_std_active;  // 1 where the clamp is not binding
  Eigen::MatrixXd u;
  Eigen::MatrixXd squashed;
  Eigen::VectorXd log_prob;
};

PolicyForward RunPolicy(const Mlp& policy, const Eigen::MatrixXd& obs,
                        const Eigen::MatrixXd& noise,
                        const ActionBounds& bounds) {
  PolicyForward f;
  const Eigen::MatrixXd out = policy.Forward(obs, &f.cache);
  const Eigen::Index batch = obs.cols();
  f.mean = out.topRows(kActionSize);
  const Eigen::MatrixXd raw = out.bottomRows(kActionSize);
  f.log_std = raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  f.log_std_active =
      ((raw.array() > kLogStdMin) && (raw.array() < kLogStdMax)).cast<double>();
  f.u = f.mean + (f.log_std.array().exp() * noise.array()).matrix();
  f.squashed = f.u.array().tanh().matrix();
  f.log_prob = Eigen::VectorXd::Zero(batch);
  const double log_half_range = std::log(bounds.half_range());
  for (Eigen::Index b = 0; b < batch; ++b) {
    double lp = 0.0;
    for (int j = 0; j < kActionSize; ++j) {
      const double eps = noise(j, b);
      lp += -0.5 * eps * eps - f.log_std(j, b) - kHalfLogTwoPi -
            LogOneMinusTanhSquared(f.u(j, b)) - log_half_range;
    }
    f.log_prob[b] = lp;
  }
  return f;
}

nlohmann::json ToJson(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd VectorFromJson(const nlohmann::json& j, Eigen::Index size) {
  const auto values = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != size) {
    throw std::invalid_argument("checkpoint: parameter count mismatch");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), size);
}

nlohmann::json OptimizerJson(const Adam& opt) {
  return {{"m", ToJson(opt.first_moment())},
          {"v", ToJson(opt.second_moment())},
          {"t", opt.steps()}};
}

void RestoreOptimizer(const nlohmann::json& j, Adam* opt) {
  const Eigen::Index n = opt->first_moment().size();
  opt->Restore(VectorFromJson(j.at("m"), n), VectorFromJson(j.at("v"), n),
               j.at("t").get<std::int64_t>());
}

std::string DumpBatch(const SacBatch& batch) {
  nlohmann::json j;
  auto mat = [](const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> cols;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      cols.emplace_back(m.col(c).data(), m.col(c).data() + m.rows());
    }
    return cols;
  };
  j["obs"] = mat(batch.obs);
  j["action"] = mat(batch.action);
  j["reward"] = ToJson(batch.reward);
  j["done"] = ToJson(batch.done);
  j["next_obs"] = mat(batch.next_obs);
  return j.dump();
}

}  // namespace

void SacConfig::Validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("sac: gamma must be in [0, 1)");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("sac: tau must be in (0, 1]");
  }
  if (!(action_low < action_high)) {
    throw std::invalid_argument("sac: action bounds must satisfy low < high");
  }
  if (batch_size == 0 || replay_capacity < batch_size || update_every < 1 ||
      !(learning_rate > 0.0) || !(initial_alpha > 0.0) ||
      hidden_sizes.empty()) {
    throw std::invalid_argument("sac: invalid configuration");
  }
}

Eigen::VectorXd NormalizeObservation(const TrackingObservation& obs) {
  Eigen::VectorXd v(TrackingObservation::kSize);
  v << obs.e / 0.5, obs.dtheta / std::numbers::pi, obs.dv / 0.5,
      obs.slip_dv / 1.0, obs.slip_dw / 4.0;
  return v;
}

double LogOneMinusTanhSquared(double u) {
  // 1 - tanh^2(u) = 4 / (e^u + e^-u)^2
  const double a = std::abs(u);
  return 2.0 * (std::numbers::ln2 - a - std::log1p(std::exp(-2.0 * a)));
}

double SquashedGaussianLogProb(double mean, double log_std, double u,
                               double half_range) {
  const double z = (u - mean) / std::exp(log_std);
  return -0.5 * z * z - log_std - kHalfLogTwoPi - LogOneMinusTanhSquared(u) -
         std::log(half_range);
}

PolicySample SamplePolicy(const Mlp& policy, const TrackingObservation& obs,
                          const std::array<double, kActionSize>& noise,
                          const ActionBounds& bounds) {
  Eigen::MatrixXd eps(kActionSize, 1);
  eps << noise[0], noise[1];
  const PolicyForward f =
      RunPolicy(policy, NormalizeObservation(obs), eps, bounds);
  PolicySample s;
  s.gains = {bounds.ToGain(f.squashed(0, 0)), bounds.ToGain(f.squashed(1, 0))};
  s.pre_squash = {f.u(0, 0), f.u(1, 0)};
  s.log_prob = f.log_prob[0];
  return s;
}

Gains ActDeterministic(const Mlp& policy, const TrackingObservation& obs,
                       const ActionBounds& bounds) {
  const Eigen::MatrixXd out = policy.Forward(NormalizeObservation(obs));
  return {bounds.ToGain(std::tanh(out(0, 0))),
          bounds.ToGain(std::tanh(out(1, 0)))};
}

SacBatch MakeBatch(const std::vector<Transition>& transitions,
                   const ActionBounds& bounds) {
  const auto n = static_cast<Eigen::Index>(transitions.size());
  SacBatch b;
  b.obs.resize(TrackingObservation::kSize, n);
  b.next_obs.resize(TrackingObservation::kSize, n);
  b.action.resize(kActionSize, n);
  b.reward.resize(n);
  b.done.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = transitions[i];
    b.obs.col(i) = NormalizeObservation(t.obs);
    b.next_obs.col(i) = NormalizeObservation(t.next_obs);
    b.action(0, i) = bounds.ToSquashed(t.action.k_stanley);
    b.action(1, i) = bounds.ToSquashed(t.action.k_speed);
    b.reward[i] = t.reward;
    b.done[i] = t.done ? 1.0 : 0.0;
  }
  return b;
}

Eigen::MatrixXd CriticInput(const Eigen::MatrixXd& obs,
                            const Eigen::MatrixXd& action) {
  Eigen::MatrixXd in(obs.rows() + action.rows(), obs.cols());
  in.topRows(obs.rows()) = obs;
  in.bottomRows(action.rows()) = action;
  return in;
}

Eigen::VectorXd CriticTargets(const Mlp& policy, const Mlp& q1_target,
                              const Mlp& q2_target, const SacBatch& batch,
                              const Eigen::MatrixXd& noise, double alpha,
                              double gamma, const ActionBounds& bounds) {
  const PolicyForward next = RunPolicy(policy, batch.next_obs, noise, bounds);
  const Eigen::MatrixXd in = CriticInput(batch.next_obs, next.squashed);
  const Eigen::VectorXd q1 = q1_target.Forward(in).row(0).transpose();
  const Eigen::VectorXd q2 = q2_target.Forward(in).row(0).transpose();
  const Eigen::VectorXd soft = q1.cwiseMin(q2) - alpha * next.log_prob;
  return batch.reward.array() +
         gamma * (1.0 - batch.done.array()) * soft.array();
}

double CriticLossAndGrad(const Mlp& q, const Eigen::MatrixXd& input,
                         const Eigen::VectorXd& targets, Eigen::VectorXd* grad) {
  Mlp::Cache cache;
  const Eigen::VectorXd pred = q.Forward(input, &cache).row(0).transpose();
  const Eigen::VectorXd err = pred - targets;
  const double n = static_cast<double>(input.cols());
  if (grad) {
    const Eigen::MatrixXd dout = (2.0 / n) * err.transpose();
    q.Backward(cache, dout, grad);
  }
  return err.squaredNorm() / n;
}

PolicyLoss PolicyLossAndGrad(const Mlp& policy, const Mlp& q1, const Mlp& q2,
                             const Eigen::MatrixXd& obs,
                             const Eigen::MatrixXd& noise, double alpha,
                             const ActionBounds& bounds, Eigen::VectorXd* grad) {
  const Eigen::Index batch = obs.cols();
  const double n = static_cast<double>(batch);
  const PolicyForward f = RunPolicy(policy, obs, noise, bounds);
  const Eigen::MatrixXd in = CriticInput(obs, f.squashed);
  Mlp::Cache c1, c2;
  const Eigen::RowVectorXd v1 = q1.Forward(in, &c1).row(0);
  const Eigen::RowVectorXd v2 = q2.Forward(in, &c2).row(0);
  const Eigen::RowVectorXd qmin = v1.cwiseMin(v2);

  PolicyLoss out;
  out.mean_log_prob = f.log_prob.mean();
  out.loss = (alpha * f.log_prob.transpose() - qmin).sum() / n;
  if (!grad) return out;

  // d(-Qmin)/dQk, routed to whichever critic is the minimum.
  const Eigen::RowVectorXd pick1 = (v1.array() <= v2.array()).cast<double>();
  const Eigen::MatrixXd d1 = (-1.0 / n) * pick1;
  const Eigen::MatrixXd d2 = (-1.0 / n) * (1.0 - pick1.array()).matrix();
  Eigen::VectorXd scratch1 = Eigen::VectorXd::Zero(q1.num_params());
  Eigen::VectorXd scratch2 = Eigen::VectorXd::Zero(q2.num_params());
  const Eigen::MatrixXd din = q1.Backward(c1, d1, &scratch1) +
                              q2.Backward(c2, d2, &scratch2);
  const Eigen::MatrixXd d_squashed = din.bottomRows(kActionSize);

  // log pi depends on u through -log(1 - tanh^2 u), whose derivative is
  // 2 tanh u; u = mean + std * noise.
  const Eigen::ArrayXXd s = f.squashed.array();
  const Eigen::ArrayXXd d_u =
      (alpha / n) * 2.0 * s + d_squashed.array() * (1.0 - s.square());
  Eigen::MatrixXd dout(2 * kActionSize, batch);
  dout.topRows(kActionSize) = d_u.matrix();
  dout.bottomRows(kActionSize) =
      ((-alpha / n) + d_u * f.log_std.array().exp() * noise.array()) *
      f.log_std_active.array();
  policy.Backward(f.cache, dout, grad);
  return out;
}

void SoftUpdate(const Mlp& online, double tau, Mlp* target) {
  if (tau == 1.0) {
    target->mutable_params() = online.params();
    return;
  }
  target->mutable_params() =
      tau * online.params() + (1.0 - tau) * target->params();
}

SacAgent::SacAgent(const SacConfig& config, std::uint64_t seed)
    : config_(config), rng_(seed), replay_(config.replay_capacity) {
  config_.Validate();
  const int obs = TrackingObservation::kSize;
  policy_ = Mlp(NetworkSizes(obs, config_.hidden_sizes, 2 * kActionSize));
  q1_ = Mlp(NetworkSizes(obs + kActionSize, config_.hidden_sizes, 1));
  q2_ = Mlp(NetworkSizes(obs + kActionSize, config_.hidden_sizes, 1));
  policy_.Initialize(rng_);
  q1_.Initialize(rng_);
  q2_.Initialize(rng_);
  q1_target_ = q1_;
  q2_target_ = q2_;
  policy_opt_ = Adam(policy_.num_params(), config_.learning_rate);
  q1_opt_ = Adam(q1_.num_params(), config_.learning_rate);
  q2_opt_ = Adam(q2_.num_params(), config_.learning_rate);
  alpha_opt_ = Adam(1, config_.learning_rate);
  log_alpha_ = Eigen::VectorXd::Constant(1, std::log(config_.initial_alpha));
}

double SacAgent::alpha() const { return std::exp(log_alpha_[0]); }

Eigen::MatrixXd SacAgent::Noise(Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(kActionSize, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (int r = 0; r < kActionSize; ++r) m(r, c) = normal(rng_);
  }
  return m;
}

PolicySample SacAgent::Sample(const TrackingObservation& obs) {
  const Eigen::MatrixXd eps = Noise(1);
  return SamplePolicy(policy_, obs, {eps(0, 0), eps(1, 0)}, bounds());
}

PolicySample SacAgent::RandomAction() {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const ActionBounds b = bounds();
  PolicySample s;
  for (int j = 0; j < kActionSize; ++j) {
    // Keep away from +-1 so atanh stays finite.
    const double squashed = std::clamp(unit(rng_), -0.999999, 0.999999);
    s.pre_squash[j] = std::atanh(squashed);
    (j == 0 ? s.gains.k_stanley : s.gains.k_speed) = b.ToGain(squashed);
  }
  return s;
}

Gains SacAgent::Act(const TrackingObservation& obs) const {
  return ActDeterministic(policy_, obs, bounds());
}

void SacAgent::Observe(const Transition& t) {
  replay_.Push(t);
  ++env_steps_;
}

UpdateReport SacAgent::Update() {
  UpdateReport report;
  report.alpha = alpha();
  if (replay_.size() < config_.batch_size ||
      static_cast<std::size_t>(env_steps_) < config_.warmup_steps) {
    return report;
  }
  report.ready = true;
  const ActionBounds b = bounds();
  const SacBatch batch = MakeBatch(replay_.Sample(config_.batch_size, rng_), b);
  const Eigen::Index n = batch.obs.cols();
  const double a = alpha();

  const Eigen::VectorXd targets =
      CriticTargets(policy_, q1_target_, q2_target_, batch, Noise(n), a,
                    config_.gamma, b);
  const Eigen::MatrixXd critic_in = CriticInput(batch.obs, batch.action);
  Eigen::VectorXd g1 = Eigen::VectorXd::Zero(q1_.num_params());
  Eigen::VectorXd g2 = Eigen::VectorXd::Zero(q2_.num_params());
  report.critic1_loss = CriticLossAndGrad(q1_, critic_in, targets, &g1);
  report.critic2_loss = CriticLossAndGrad(q2_, critic_in, targets, &g2);
  if (!std::isfinite(report.critic1_loss) ||
      !std::isfinite(report.critic2_loss)) {
    throw NonFiniteLossError("sac: non-finite critic loss", DumpBatch(batch));
  }
  q1_opt_.Step(q1_.mutable_params(), g1);
  q2_opt_.Step(q2_.mutable_params(), g2);

  Eigen::VectorXd gp = Eigen::VectorXd::Zero(policy_.num_params());
  const PolicyLoss pl =
      PolicyLossAndGrad(policy_, q1_, q2_, batch.obs, Noise(n), a, b, &gp);
  if (!std::isfinite(pl.loss)) {
    throw NonFiniteLossError("sac: non-finite policy loss", DumpBatch(batch));
  }
  policy_opt_.Step(policy_.mutable_params(), gp);
  report.policy_loss = pl.loss;
  report.mean_log_prob = pl.mean_log_prob;

  if (config_.auto_entropy) {
    // loss = -log_alpha * (log pi + target_entropy)
    Eigen::VectorXd ga(1);
    ga[0] = -(pl.mean_log_prob + config_.target_entropy);
    alpha_opt_.Step(log_alpha_, ga);
  }

  SoftUpdate(q1_, config_.tau, &q1_target_);
  SoftUpdate(q2_, config_.tau, &q2_target_);
  ++updates_;
  report.alpha = alpha();
  return report;
}

void SacAgent::SaveCheckpoint(std::ostream& out,
                              std::uint64_t config_hash) const {
  nlohmann::ordered_json j;
  j["version"] = kCheckpointVersion;
  j["config_hash"] = config_hash;
  j["env_steps"] = env_steps_;
  j["updates"] = updates_;
  j["log_alpha"] = log_alpha_[0];
  j["policy_sizes"] = policy_.sizes();
  j["critic_sizes"] = q1_.sizes();
  j["policy"] = ToJson(policy_.params());
  j["q1"] = ToJson(q1_.params());
  j["q2"] = ToJson(q2_.params());
  j["q1_target"] = ToJson(q1_target_.params());
  j["q2_target"] = ToJson(q2_target_.params());
  j["policy_opt"] = OptimizerJson(policy_opt_);
  j["q1_opt"] = OptimizerJson(q1_opt_);
  j["q2_opt"] = OptimizerJson(q2_opt_);
  j["alpha_opt"] = OptimizerJson(alpha_opt_);
  out << j.dump() << '\n';
}

SacAgent SacAgent::LoadCheckpoint(std::istream& in, const SacConfig& config,
                                  std::uint64_t* config_hash) {
  const nlohmann::json j = nlohmann::json::parse(in);
  if (j.at("version").get<int>() != kCheckpointVersion) {
    throw std::invalid_argument("checkpoint: unsupported version");
  }
  SacAgent agent(config, 0);
  if (j.at("policy_sizes").get<std::vector<int>>() != agent.policy_.sizes() ||
      j.at("critic_sizes").get<std::vector<int>>() != agent.q1_.sizes()) {
    throw std::invalid_argument("checkpoint: network shape mismatch");
  }
  agent.policy_.mutable_params() =
      VectorFromJson(j.at("policy"), agent.policy_.num_params());
  agent.q1_.mutable_params() = VectorFromJson(j.at("q1"), agent.q1_.num_params());
  agent.q2_.mutable_params() = VectorFromJson(j.at("q2"), agent.q2_.num_params());
  agent.q1_target_.mutable_params() =
      VectorFromJson(j.at("q1_target"), agent.q1_.num_params());
  agent.q2_target_.mutable_params() =
      VectorFromJson(j.at("q2_target"), agent.q2_.num_params());
  RestoreOptimizer(j.at("policy_opt"), &agent.policy_opt_);
  RestoreOptimizer(j.at("q1_opt"), &agent.q1_opt_);
  RestoreOptimizer(j.at("q2_opt"), &agent.q2_opt_);
  RestoreOptimizer(j.at("alpha_opt"), &agent.alpha_opt_);
  agent.log_alpha_[0] = j.at("log_alpha").get<double>();
  agent.env_steps_ = j.at("env_steps").get<std::int64_t>();
  agent.updates_ = j.at("updates").get<std::int64_t>();
  if (config_hash) *config_hash = j.at("config_hash").get<std::uint64_t>();
  return agent;
}

Mlp LoadPolicyFromCheckpoint(std::istream& in) {
  const nlohmann::json j = nlohmann::json::parse(in);
  if (j.at("version").get<int>() != kCheckpointVersion) {
    throw std::invalid_argument("checkpoint: unsupported version");
  }
  Mlp policy(j.at("policy_sizes").get<std::vector<int>>());
  policy.mutable_params() = VectorFromJson(j.at("policy"), policy.num_params());
  return policy;
}

}  // namespace slipgain
