// include/emoser/common/rng.hpp

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

#include <cstdint>
#include <random>
#include <string_view>

namespace emoser {

// Seedable generator with portable output. The engine is std::mt19937_64,
// whose sequence the standard fixes exactly; the distributions below are
// implemented here because the std:: ones differ between library vendors.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+rejection-uniform";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer on the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform double on [0, 1) with 53 random bits.
  double uniform();

  // Standard normal draw (Box-Muller, one value per call).
  double normal();

  // Fisher-Yates shuffle driven by uniform_int.
  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::int64_t>(last - first);
    for (std::int64_t i = n - 1; i > 0; --i) {
      std::swap(first[i], first[uniform_int(0, i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from (root, purpose tag, id) via
// FNV-1a over the tag followed by splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t id = 0);

}  // namespace emoser
