// include/emoser/tensor/optim.hpp

// Copyright 2026 The emoser Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <vector>

#include "emoser/tensor/tensor.hpp"

namespace emoser::tensor {

// Heavy-ball momentum update on raw buffers:
//   v <- momentum * v + g
//   w <- w - lr * v
template <typename T>
void sgd_step(std::span<T> weights, std::span<const T> grads, std::span<T> velocity,
              double momentum, double lr);

// Constant for the first `constant_epochs`, then halved every
// `halving_period` epochs: epochs 9-10 get lr0/2, 11-12 lr0/4, ...
struct LrSchedule {
  double initial = 1e-2;
  int constant_epochs = 8;
  int halving_period = 2;

  // epoch is 1-based.
  double lr_at_epoch(int epoch) const;
};

class SgdMomentum {
 public:
  SgdMomentum(std::vector<Tensor<float>> params, double momentum = 0.9);

  void set_lr(double lr);
  double lr() const { return lr_; }
  double momentum() const { return momentum_; }

  // Updates every parameter that requires a gradient and has one. Frozen
  // parameters (requires_grad false) are left untouched.
  void step();
  void zero_grad();

  const std::vector<float>& velocity(std::size_t i) const { return velocity_[i]; }

 private:
  std::vector<Tensor<float>> params_;
  std::vector<std::vector<float>> velocity_;
  double momentum_;
  double lr_ = 1e-2;
};

}  // namespace emoser::tensor
