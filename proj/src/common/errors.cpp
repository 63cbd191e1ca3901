// src/common/errors.cpp

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

#include "emoser/common/errors.hpp"

#include <cmath>

namespace emoser {

namespace {

template <typename T>
void check_finite_impl(const T* data, std::size_t n, const char* where) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(data[i])) {
      throw NumericError(std::string("non-finite value in ") + where + " at index " +
                         std::to_string(i));
    }
  }
}

}  // namespace

void check_finite(const float* data, std::size_t n, const char* where) {
  check_finite_impl(data, n, where);
}

void check_finite(const double* data, std::size_t n, const char* where) {
  check_finite_impl(data, n, where);
}

}  // namespace emoser
