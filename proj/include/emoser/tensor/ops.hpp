// include/emoser/tensor/ops.hpp

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

// Differentiable operators, each with a hand-written backward pass. All are
// instantiated for float (training) and double (gradient checking).
namespace emoser::tensor {

struct Conv2dParams {
  int stride_h = 1;
  int stride_w = 1;
  int pad_h = 0;
  int pad_w = 0;
};

// x: N x C x H x W, weight: O x C x kh x kw -> N x O x H' x W' with
// H' = floor((H + 2 pad - k) / stride) + 1. Cross-correlation, no bias.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Conv2dParams& params);

struct Pool2dParams {
  int kernel = 3;
  int stride = 2;
  int pad = 1;
};

// Max over k x k windows; padded cells never win.
template <typename T>
Tensor<T> max_pool2d(const Tensor<T>& x, const Pool2dParams& params);

struct BatchNormOptions {
  bool training = true;
  double momentum = 0.1;
  double eps = 1e-5;
};

// Normalizes per channel (axis 1) over every other axis. Training mode uses
// batch statistics and updates the running buffers:
//   running = (1 - momentum) * running + momentum * batch_stat
// with the unbiased variance for running_var. Eval mode uses the buffers
// unchanged.
template <typename T>
Tensor<T> batch_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                     std::vector<T>& running_mean, std::vector<T>& running_var,
                     const BatchNormOptions& options);

// y = x for x > 0, slope[c] * x otherwise; channel axis 1.
template <typename T>
Tensor<T> prelu(const Tensor<T>& x, const Tensor<T>& slope);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

// x: N x I, weight: O x I, bias: O -> N x O.
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

// Mean over one axis, which is removed from the shape.
template <typename T>
Tensor<T> mean_over_axis(const Tensor<T>& x, int axis);

// Statistics pooling. x: N x C x T -> N x 2C holding per-channel means
// followed by sqrt(population variance + eps_std).
template <typename T>
Tensor<T> mean_std_over_time(const Tensor<T>& x, double eps_std);

// x: N x C x T -> N x C.
template <typename T>
Tensor<T> mean_over_time(const Tensor<T>& x);

// Mean over the batch of -log softmax(logits)[label], max-subtracted.
template <typename T>
Tensor<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const int> labels);

}  // namespace emoser::tensor
