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

#ifndef SLIPGAIN_REPLAY_BUFFER_H_
#define SLIPGAIN_REPLAY_BUFFER_H_

#include <array>
#include <cstddef>
#include <random>
#include <vector>

#include "slipgain/controllers.h"

namespace slipgain {

// The 5-variable tracking state, in this order.
struct TrackingObservation {
  double e = 0.0;
  double dtheta = 0.0;
  double dv = 0.0;
  double slip_dv = 0.0;
  double slip_dw = 0.0;

  static constexpr int kSize = 5;
  std::array<double, kSize> ToArray() const {
    return {e, dtheta, dv, slip_dv, slip_dw};
  }
};

struct Transition {
  TrackingObservation obs;
  Gains action;
  std::array<double, 2> pre_squash{};  // Gaussian sample before tanh
  double reward = 0.0;
  TrackingObservation next_obs;
  bool done = false;
};

// Fixed-capacity FIFO; once full the oldest transition is overwritten.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void Push(const Transition& t);
  // Uniform sampling with replacement.
  std::vector<Transition> Sample(std::size_t batch, std::mt19937_64& rng) const;

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

}  // namespace slipgain

#endif  // SLIPGAIN_REPLAY_BUFFER_H_
