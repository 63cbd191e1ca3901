// src/tensor/conv_kernels.cpp

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

#include "emoser/tensor/conv_kernels.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <vector>

namespace emoser::tensor::kernels {

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMatrix = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMapMatrix = Eigen::Map<const RowMatrix<T>>;

// Column matrix of shape (C*kh*kw) x (out_h*out_w) for one sample.
template <typename T>
void im2col(const ConvGeometry& g, const T* x, T* col) {
  const int oh = g.out_h(), ow = g.out_w();
  for (int c = 0; c < g.in_channels; ++c) {
    const T* xc = x + std::size_t(c) * g.in_h * g.in_w;
    for (int ki = 0; ki < g.kernel_h; ++ki) {
      for (int kj = 0; kj < g.kernel_w; ++kj) {
        T* row = col + ((std::size_t(c) * g.kernel_h + ki) * g.kernel_w + kj) * oh * ow;
        for (int i = 0; i < oh; ++i) {
          const int y = i * g.stride_h - g.pad_h + ki;
          T* dst = row + std::size_t(i) * ow;
          if (y < 0 || y >= g.in_h) {
            std::fill_n(dst, ow, T(0));
            continue;
          }
          const T* src = xc + std::size_t(y) * g.in_w;
          if (g.stride_w == 1) {
            const int x0 = kj - g.pad_w;
            const int lo = std::min(std::max(0, -x0), ow);
            const int hi = std::min(ow, g.in_w - x0);
            std::fill_n(dst, lo, T(0));
            if (hi > lo) std::copy(src + x0 + lo, src + x0 + hi, dst + lo);
            if (hi < ow) std::fill(dst + std::max(hi, lo), dst + ow, T(0));
          } else {
            for (int j = 0; j < ow; ++j) {
              const int xx = j * g.stride_w - g.pad_w + kj;
              dst[j] = (xx >= 0 && xx < g.in_w) ? src[xx] : T(0);
            }
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const ConvGeometry& g, const T* col, T* dx) {
  const int oh = g.out_h(), ow = g.out_w();
  for (int c = 0; c < g.in_channels; ++c) {
    T* xc = dx + std::size_t(c) * g.in_h * g.in_w;
    for (int ki = 0; ki < g.kernel_h; ++ki) {
      for (int kj = 0; kj < g.kernel_w; ++kj) {
        const T* row = col + ((std::size_t(c) * g.kernel_h + ki) * g.kernel_w + kj) * oh * ow;
        for (int i = 0; i < oh; ++i) {
          const int y = i * g.stride_h - g.pad_h + ki;
          if (y < 0 || y >= g.in_h) continue;
          T* dst = xc + std::size_t(y) * g.in_w;
          const T* src = row + std::size_t(i) * ow;
          for (int j = 0; j < ow; ++j) {
            const int xx = j * g.stride_w - g.pad_w + kj;
            if (xx >= 0 && xx < g.in_w) dst[xx] += src[j];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
void conv2d_forward(const ConvGeometry& g, const T* input, const T* weight, T* output) {
  const auto patch = static_cast<Eigen::Index>(g.patch_size());
  const auto pixels = static_cast<Eigen::Index>(g.out_h()) * g.out_w();
  const ConstMapMatrix<T> w(weight, g.out_channels, patch);
#pragma omp parallel
  {
    std::vector<T> col(std::size_t(patch) * pixels);
#pragma omp for schedule(static)
    for (int n = 0; n < g.batch; ++n) {
      im2col(g, input + n * g.input_size(), col.data());
      MapMatrix<T> y(output + n * g.output_size(), g.out_channels, pixels);
      y.noalias() = w * ConstMapMatrix<T>(col.data(), patch, pixels);
    }
  }
}

template <typename T>
void conv2d_backward(const ConvGeometry& g, const T* input, const T* weight, const T* grad_output,
                     T* grad_input, T* grad_weight) {
  const auto patch = static_cast<Eigen::Index>(g.patch_size());
  const auto pixels = static_cast<Eigen::Index>(g.out_h()) * g.out_w();
  const ConstMapMatrix<T> w(weight, g.out_channels, patch);
  std::vector<T> per_sample_dw;
  if (grad_weight) per_sample_dw.assign(std::size_t(g.batch) * g.weight_size(), T(0));

#pragma omp parallel
  {
    std::vector<T> col(std::size_t(patch) * pixels);
#pragma omp for schedule(static)
    for (int n = 0; n < g.batch; ++n) {
      const ConstMapMatrix<T> dy(grad_output + n * g.output_size(), g.out_channels, pixels);
      if (grad_weight) {
        im2col(g, input + n * g.input_size(), col.data());
        MapMatrix<T> dw(per_sample_dw.data() + n * g.weight_size(), g.out_channels, patch);
        dw.noalias() = dy * ConstMapMatrix<T>(col.data(), patch, pixels).transpose();
      }
      if (grad_input) {
        MapMatrix<T> dcol(col.data(), patch, pixels);
        dcol.noalias() = w.transpose() * dy;
        col2im_add(g, col.data(), grad_input + n * g.input_size());
      }
    }
  }

  if (grad_weight) {
    const std::size_t ws = g.weight_size();
    for (int n = 0; n < g.batch; ++n) {
      const T* src = per_sample_dw.data() + n * ws;
      for (std::size_t i = 0; i < ws; ++i) grad_weight[i] += src[i];
    }
  }
}

namespace reference {

template <typename T>
void conv2d_forward(const ConvGeometry& g, const T* input, const T* weight, T* output) {
  const int oh = g.out_h(), ow = g.out_w();
  for (int n = 0; n < g.batch; ++n)
    for (int o = 0; o < g.out_channels; ++o)
      for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j) {
          T acc = 0;
          for (int c = 0; c < g.in_channels; ++c)
            for (int ki = 0; ki < g.kernel_h; ++ki)
              for (int kj = 0; kj < g.kernel_w; ++kj) {
                const int y = i * g.stride_h - g.pad_h + ki;
                const int x = j * g.stride_w - g.pad_w + kj;
                if (y < 0 || y >= g.in_h || x < 0 || x >= g.in_w) continue;
                acc += input[((std::size_t(n) * g.in_channels + c) * g.in_h + y) * g.in_w + x] *
                       weight[((std::size_t(o) * g.in_channels + c) * g.kernel_h + ki) * g.kernel_w + kj];
              }
          output[((std::size_t(n) * g.out_channels + o) * oh + i) * ow + j] = acc;
        }
}

template <typename T>
void conv2d_backward(const ConvGeometry& g, const T* input, const T* weight, const T* grad_output,
                     T* grad_input, T* grad_weight) {
  const int oh = g.out_h(), ow = g.out_w();
  for (int n = 0; n < g.batch; ++n)
    for (int o = 0; o < g.out_channels; ++o)
      for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j) {
          const T dy = grad_output[((std::size_t(n) * g.out_channels + o) * oh + i) * ow + j];
          for (int c = 0; c < g.in_channels; ++c)
            for (int ki = 0; ki < g.kernel_h; ++ki)
              for (int kj = 0; kj < g.kernel_w; ++kj) {
                const int y = i * g.stride_h - g.pad_h + ki;
                const int x = j * g.stride_w - g.pad_w + kj;
                if (y < 0 || y >= g.in_h || x < 0 || x >= g.in_w) continue;
                const std::size_t xi = ((std::size_t(n) * g.in_channels + c) * g.in_h + y) * g.in_w + x;
                const std::size_t wi = ((std::size_t(o) * g.in_channels + c) * g.kernel_h + ki) * g.kernel_w + kj;
                if (grad_input) grad_input[xi] += dy * weight[wi];
                if (grad_weight) grad_weight[wi] += dy * input[xi];
              }
        }
}

template void conv2d_forward<float>(const ConvGeometry&, const float*, const float*, float*);
template void conv2d_forward<double>(const ConvGeometry&, const double*, const double*, double*);
template void conv2d_backward<float>(const ConvGeometry&, const float*, const float*, const float*,
                                     float*, float*);
template void conv2d_backward<double>(const ConvGeometry&, const double*, const double*,
                                      const double*, double*, double*);

}  // namespace reference

template void conv2d_forward<float>(const ConvGeometry&, const float*, const float*, float*);
template void conv2d_forward<double>(const ConvGeometry&, const double*, const double*, double*);
template void conv2d_backward<float>(const ConvGeometry&, const float*, const float*, const float*,
                                     float*, float*);
template void conv2d_backward<double>(const ConvGeometry&, const double*, const double*,
                                      const double*, double*, double*);

}  // namespace emoser::tensor::kernels
