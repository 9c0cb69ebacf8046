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

#include "slipgain/mlp.h"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace slipgain {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw std::invalid_argument("mlp needs at least input and output sizes");
  }
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) {
      throw std::invalid_argument("mlp layer sizes must be positive");
    }
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_ = Eigen::VectorXd::Zero(total);
}

void Mlp::Initialize(std::mt19937_64& rng) {
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const Eigen::Index count =
        static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
    for (Eigen::Index k = 0; k < count; ++k) params_[offsets_[l] + k] = dist(rng);
  }
}

Eigen::Map<const Eigen::MatrixXd> Mlp::Weight(std::size_t layer) const {
  return {params_.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::Bias(std::size_t layer) const {
  const Eigen::Index start =
      offsets_[layer] +
      static_cast<Eigen::Index>(sizes_[layer + 1]) * sizes_[layer];
  return {params_.data() + start, sizes_[layer + 1]};
}

Eigen::Index Mlp::output_bias_offset() const {
  const std::size_t last = sizes_.size() - 2;
  return offsets_[last] +
         static_cast<Eigen::Index>(sizes_[last + 1]) * sizes_[last];
}

Eigen::MatrixXd Mlp::Forward(const Eigen::MatrixXd& input, Cache* cache) const {
  if (input.rows() != input_size()) {
    throw std::invalid_argument("mlp forward: input size mismatch");
  }
  const std::size_t layers = sizes_.size() - 1;
  if (cache) cache->layer_inputs.assign(1, input);
  Eigen::MatrixXd h = input;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = Weight(l) * h;
    z.colwise() += Bias(l);
    if (l + 1 < layers) {
      // tanh via the vectorized exp; Eigen's double tanh is scalar.
      h = (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix();
      if (cache) cache->layer_inputs.push_back(h);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Eigen::MatrixXd Mlp::Backward(const Cache& cache,
                              const Eigen::MatrixXd& grad_output,
                              Eigen::VectorXd* grad) const {
  const std::size_t layers = sizes_.size() - 1;
  if (cache.layer_inputs.size() != layers) {
    throw std::invalid_argument("mlp backward: cache from another network");
  }
  if (grad->size() != params_.size()) {
    throw std::invalid_argument("mlp backward: gradient size mismatch");
  }
  Eigen::MatrixXd delta = grad_output;  // dL/dz for the current layer
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::MatrixXd& in = cache.layer_inputs[l];
    const Eigen::Index rows = sizes_[l + 1];
    const Eigen::Index cols = sizes_[l];
    Eigen::Map<Eigen::MatrixXd> dw(grad->data() + offsets_[l], rows, cols);
    Eigen::Map<Eigen::VectorXd> db(grad->data() + offsets_[l] + rows * cols,
                                   rows);
    dw.noalias() += delta * in.transpose();
    db += delta.rowwise().sum();
    Eigen::MatrixXd upstream = Weight(l).transpose() * delta;
    if (l > 0) {
      // Input of layer l is tanh(z_{l-1}); d tanh = 1 - tanh^2.
      upstream.array() *= 1.0 - in.array().square();
    }
    delta = std::move(upstream);
  }
  return delta;
}

Adam::Adam(Eigen::Index size, double learning_rate, double beta1, double beta2,
           double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(Eigen::VectorXd::Zero(size)),
      v_(Eigen::VectorXd::Zero(size)) {}

void Adam::Step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -=
      lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

void Adam::Restore(Eigen::VectorXd m, Eigen::VectorXd v, std::int64_t t) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw std::invalid_argument("adam restore: size mismatch");
  }
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = t;
}

}  // namespace slipgain
