// src/frontend/fft.cpp

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

#include "emoser/frontend/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace emoser::frontend {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (!is_power_of_two(n)) throw std::invalid_argument("fft size must be a power of two");
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void FftPlan::transform(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw std::invalid_argument("fft: data size does not match plan");
  const std::size_t n = n_;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const auto u = data[start + k];
        const auto v = data[start + k + half] * twiddles_[k * stride];
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

void FftPlan::power_spectrum(std::span<const double> frame,
                             std::vector<std::complex<double>>& scratch,
                             std::span<double> out) const {
  if (frame.size() > n_) throw std::invalid_argument("frame longer than fft size");
  if (out.size() != n_ / 2 + 1) throw std::invalid_argument("power_spectrum: bad output size");
  scratch.assign(n_, {0.0, 0.0});
  for (std::size_t i = 0; i < frame.size(); ++i) scratch[i] = {frame[i], 0.0};
  transform(scratch);
  for (std::size_t k = 0; k <= n_ / 2; ++k) out[k] = std::norm(scratch[k]);
}

}  // namespace emoser::frontend
