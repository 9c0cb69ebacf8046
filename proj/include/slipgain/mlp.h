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

#ifndef SLIPGAIN_MLP_H_
#define SLIPGAIN_MLP_H_

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace slipgain {

// Fully connected network with tanh hidden layers and a linear output layer.
// Parameters live in one flat vector, layer by layer: the column-major weight
// matrix (out x in) followed by the bias. Samples are columns.
class Mlp {
 public:
  // Activations kept from a forward pass for the backward pass.
  struct Cache {
    std::vector<Eigen::MatrixXd> layer_inputs;
  };

  Mlp() = default;
  explicit Mlp(std::vector<int> sizes);

  // Uniform(+-1/sqrt(fan_in)) initialization for weights and biases.
  void Initialize(std::mt19937_64& rng);

  Eigen::MatrixXd Forward(const Eigen::MatrixXd& input,
                          Cache* cache = nullptr) const;

  // Accumulates dL/dparams into `grad` (same layout as params()) and returns
  // dL/dinput, given dL/doutput for the batch recorded in `cache`.
  Eigen::MatrixXd Backward(const Cache& cache,
                           const Eigen::MatrixXd& grad_output,
                           Eigen::VectorXd* grad) const;

  const Eigen::VectorXd& params() const { return params_; }
  Eigen::VectorXd& mutable_params() { return params_; }
  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  Eigen::Index num_params() const { return params_.size(); }

  // Offset of the bias of the final layer inside params().
  Eigen::Index output_bias_offset() const;

 private:
  Eigen::Map<const Eigen::MatrixXd> Weight(std::size_t layer) const;
  Eigen::Map<const Eigen::VectorXd> Bias(std::size_t layer) const;

  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;  // start of W for each layer
  Eigen::VectorXd params_;
};

// Adam with bias correction.
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index size, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double epsilon = 1e-8);

  void Step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  const Eigen::VectorXd& first_moment() const { return m_; }
  const Eigen::VectorXd& second_moment() const { return v_; }
  std::int64_t steps() const { return t_; }
  void Restore(Eigen::VectorXd m, Eigen::VectorXd v, std::int64_t t);

 private:
  double lr_ = 0.0;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  std::int64_t t_ = 0;
};

}  // namespace slipgain

#endif  // SLIPGAIN_MLP_H_
