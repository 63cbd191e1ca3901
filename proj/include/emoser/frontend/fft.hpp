// include/emoser/frontend/fft.hpp

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

#include <complex>
#include <span>
#include <vector>

namespace emoser::frontend {

bool is_power_of_two(std::size_t n);

// Iterative radix-2 FFT with a precomputed twiddle table.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  // In-place forward transform; data.size() must equal size().
  void transform(std::span<std::complex<double>> data) const;

  // |X[k]|^2 for k = 0..n/2 of a real frame zero-padded to n. `scratch` is
  // caller-owned so one plan can serve several threads.
  void power_spectrum(std::span<const double> frame, std::vector<std::complex<double>>& scratch,
                      std::span<double> out) const;

 private:
  std::size_t n_;
  std::vector<std::complex<double>> twiddles_;
};

}  // namespace emoser::frontend
