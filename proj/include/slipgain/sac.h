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

#ifndef SLIPGAIN_SAC_H_
#define SLIPGAIN_SAC_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slipgain/controllers.h"
#include "slipgain/mlp.h"
#include "slipgain/replay_buffer.h"

namespace slipgain {

struct SacConfig {
  std::vector<int> hidden_sizes{64, 64};
  double learning_rate = 6e-4;
  double gamma = 0.99;
  double tau = 0.005;
  std::size_t batch_size = 256;
  std::size_t replay_capacity = 100000;
  bool auto_entropy = true;
  double initial_alpha = 0.2;  // the fixed value when auto_entropy is off
  double target_entropy = -2.0;
  double action_low = kMinGain;
  double action_high = kMaxGain;
  int update_every = 1;
  std::size_t warmup_steps = 1000;

  void Validate() const;
};

inline constexpr int kActionSize = 2;
inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

// Elementwise observation scaling: e/0.5, dtheta/pi, dv/0.5, slip_dv/1,
// slip_dw/4.
Eigen::VectorXd NormalizeObservation(const TrackingObservation& obs);

// Affine map between the tanh range (-1, 1) and the gain bounds.
struct ActionBounds {
  double low = kMinGain;
  double high = kMaxGain;

  double center() const { return 0.5 * (high + low); }
  double half_range() const { return 0.5 * (high - low); }
  double ToGain(double squashed) const { return center() + half_range() * squashed; }
  double ToSquashed(double gain) const { return (gain - center()) / half_range(); }
};

// log(1 - tanh(u)^2) without cancellation.
double LogOneMinusTanhSquared(double u);

// Log density of the bounded action produced from pre-squash sample `u`
// drawn from Normal(mean, exp(log_std)), including the tanh and affine
// change-of-variables terms. One action dimension.
double SquashedGaussianLogProb(double mean, double log_std, double u,
                               double half_range);

struct PolicySample {
  Gains gains;
  std::array<double, kActionSize> pre_squash{};
  double log_prob = 0.0;
};

// Squashed-Gaussian sample with standard-normal `noise`.
PolicySample SamplePolicy(const Mlp& policy, const TrackingObservation& obs,
                          const std::array<double, kActionSize>& noise,
                          const ActionBounds& bounds);

// tanh of the policy mean mapped to the bounds.
Gains ActDeterministic(const Mlp& policy, const TrackingObservation& obs,
                       const ActionBounds& bounds);

// Column-major batch views used by the update rules. Observations are
// normalized (5 x B), actions are in squashed form (2 x B).
struct SacBatch {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd action;
  Eigen::VectorXd reward;
  Eigen::VectorXd done;
  Eigen::MatrixXd next_obs;
};

SacBatch MakeBatch(const std::vector<Transition>& transitions,
                   const ActionBounds& bounds);

// Stacks [obs; action] into the critic input.
Eigen::MatrixXd CriticInput(const Eigen::MatrixXd& obs,
                            const Eigen::MatrixXd& action);

// r + gamma * (1 - done) * (min(Q1', Q2')(s', a') - alpha * log pi(a'|s')),
// with a' drawn from the policy using `noise` (2 x B).
Eigen::VectorXd CriticTargets(const Mlp& policy, const Mlp& q1_target,
                              const Mlp& q2_target, const SacBatch& batch,
                              const Eigen::MatrixXd& noise, double alpha,
                              double gamma, const ActionBounds& bounds);

// Mean squared error against `targets`; gradient accumulated into `grad`.
double CriticLossAndGrad(const Mlp& q, const Eigen::MatrixXd& input,
                         const Eigen::VectorXd& targets, Eigen::VectorXd* grad);

struct PolicyLoss {
  double loss = 0.0;
  double mean_log_prob = 0.0;
};

// mean(alpha * log pi(a|s) - min(Q1, Q2)(s, a)) with reparameterized actions
// a = f(mean + std * noise); gradient wrt policy parameters into `grad`.
PolicyLoss PolicyLossAndGrad(const Mlp& policy, const Mlp& q1, const Mlp& q2,
                             const Eigen::MatrixXd& obs,
                             const Eigen::MatrixXd& noise, double alpha,
                             const ActionBounds& bounds, Eigen::VectorXd* grad);

// target <- tau * online + (1 - tau) * target.
void SoftUpdate(const Mlp& online, double tau, Mlp* target);

struct UpdateReport {
  bool ready = false;
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double policy_loss = 0.0;
  double alpha = 0.0;
  double mean_log_prob = 0.0;
};

class NonFiniteLossError : public std::runtime_error {
 public:
  NonFiniteLossError(const std::string& what, std::string batch_dump)
      : std::runtime_error(what), batch_dump_(std::move(batch_dump)) {}
  const std::string& batch_dump() const { return batch_dump_; }

 private:
  std::string batch_dump_;
};

// Soft actor-critic with twin critics, target networks and optional
// automatic entropy tuning. Single-threaded.
class SacAgent {
 public:
  SacAgent(const SacConfig& config, std::uint64_t seed);

  PolicySample Sample(const TrackingObservation& obs);
  // Uniform over the action box; used before warmup completes.
  PolicySample RandomAction();
  Gains Act(const TrackingObservation& obs) const;

  void Observe(const Transition& t);
  // One gradient step on critics, policy, entropy coefficient and targets.
  // Returns ready = false until warmup_steps transitions and a full batch have
  // been observed. Throws NonFiniteLossError on NaN/Inf losses.
  UpdateReport Update();

  double alpha() const;
  std::int64_t env_steps() const { return env_steps_; }
  std::int64_t updates() const { return updates_; }
  const SacConfig& config() const { return config_; }
  ActionBounds bounds() const { return {config_.action_low, config_.action_high}; }

  const Mlp& policy() const { return policy_; }
  const Mlp& q1() const { return q1_; }
  const Mlp& q2() const { return q2_; }
  const Mlp& q1_target() const { return q1_target_; }
  const Mlp& q2_target() const { return q2_target_; }
  Mlp& mutable_q1() { return q1_; }
  Mlp& mutable_q2() { return q2_; }
  Mlp& mutable_q1_target() { return q1_target_; }
  Mlp& mutable_q2_target() { return q2_target_; }
  Mlp& mutable_policy() { return policy_; }
  const ReplayBuffer& replay() const { return replay_; }

  // JSON container: parameters, Adam moments, entropy coefficient, counters
  // and the caller-supplied configuration hash.
  void SaveCheckpoint(std::ostream& out, std::uint64_t config_hash) const;
  static SacAgent LoadCheckpoint(std::istream& in, const SacConfig& config,
                                 std::uint64_t* config_hash = nullptr);

 private:
  Eigen::MatrixXd Noise(Eigen::Index cols);

  SacConfig config_;
  std::mt19937_64 rng_;
  Mlp policy_, q1_, q2_, q1_target_, q2_target_;
  Adam policy_opt_, q1_opt_, q2_opt_, alpha_opt_;
  Eigen::VectorXd log_alpha_;  // size 1, so Adam can drive it
  ReplayBuffer replay_;
  std::int64_t env_steps_ = 0;
  std::int64_t updates_ = 0;
};

// Loads only the policy network from a checkpoint.
Mlp LoadPolicyFromCheckpoint(std::istream& in);

}  // namespace slipgain

#endif  // SLIPGAIN_SAC_H_
