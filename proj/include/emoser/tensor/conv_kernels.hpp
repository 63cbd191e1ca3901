// include/emoser/tensor/conv_kernels.hpp

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

#include <cstddef>

namespace emoser::tensor::kernels {

// NCHW input, OIHW weights, no bias.
struct ConvGeometry {
  int batch = 1;
  int in_channels = 1;
  int in_h = 1;
  int in_w = 1;
  int out_channels = 1;
  int kernel_h = 1;
  int kernel_w = 1;
  int stride_h = 1;
  int stride_w = 1;
  int pad_h = 0;
  int pad_w = 0;

  int out_h() const { return (in_h + 2 * pad_h - kernel_h) / stride_h + 1; }
  int out_w() const { return (in_w + 2 * pad_w - kernel_w) / stride_w + 1; }
  std::size_t patch_size() const { return std::size_t(in_channels) * kernel_h * kernel_w; }
  std::size_t input_size() const { return std::size_t(in_channels) * in_h * in_w; }
  std::size_t output_size() const { return std::size_t(out_channels) * out_h() * out_w(); }
  std::size_t weight_size() const { return std::size_t(out_channels) * patch_size(); }
};

// im2col + GEMM, parallel over the batch. Every sample is computed by a
// single thread and weight gradients are reduced over samples in index
// order, so results are independent of the thread count.
template <typename T>
void conv2d_forward(const ConvGeometry& g, const T* input, const T* weight, T* output);

// Accumulates (+=) into grad_input and grad_weight; either may be null.
template <typename T>
void conv2d_backward(const ConvGeometry& g, const T* input, const T* weight, const T* grad_output,
                     T* grad_input, T* grad_weight);

// Direct seven-loop versions, serial. Test oracle and benchmark baseline.
namespace reference {

template <typename T>
void conv2d_forward(const ConvGeometry& g, const T* input, const T* weight, T* output);

template <typename T>
void conv2d_backward(const ConvGeometry& g, const T* input, const T* weight, const T* grad_output,
                     T* grad_input, T* grad_weight);

}  // namespace reference

}  // namespace emoser::tensor::kernels
