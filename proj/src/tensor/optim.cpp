// src/tensor/optim.cpp

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

#include "emoser/tensor/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace emoser::tensor {

template <typename T>
void sgd_step(std::span<T> weights, std::span<const T> grads, std::span<T> velocity,
              double momentum, double lr) {
  if (weights.size() != grads.size() || weights.size() != velocity.size()) {
    throw std::invalid_argument("sgd_step: buffer sizes differ");
  }
  const T mu = static_cast<T>(momentum);
  const T eta = static_cast<T>(lr);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    velocity[i] = mu * velocity[i] + grads[i];
    weights[i] -= eta * velocity[i];
  }
}

template void sgd_step<float>(std::span<float>, std::span<const float>, std::span<float>, double,
                              double);
template void sgd_step<double>(std::span<double>, std::span<const double>, std::span<double>,
                               double, double);

double LrSchedule::lr_at_epoch(int epoch) const {
  if (epoch < 1) throw std::invalid_argument("lr_at_epoch: epochs are 1-based");
  if (epoch <= constant_epochs) return initial;
  const int halvings = (epoch - constant_epochs + halving_period - 1) / halving_period;
  return initial * std::ldexp(1.0, -halvings);
}

SgdMomentum::SgdMomentum(std::vector<Tensor<float>> params, double momentum)
    : params_(std::move(params)), momentum_(momentum) {
  velocity_.reserve(params_.size());
  for (const auto& p : params_) velocity_.emplace_back(p.numel(), 0.0f);
}

void SgdMomentum::set_lr(double lr) {
  if (!(lr >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
  lr_ = lr;
}

void SgdMomentum::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    if (!p.requires_grad() || !p.has_grad()) continue;
    sgd_step<float>(p.data(), p.grad(), velocity_[i], momentum_, lr_);
  }
}

void SgdMomentum::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

}  // namespace emoser::tensor
