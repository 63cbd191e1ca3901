// tests/unit/test_specaug.cpp

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

#include <doctest.h>

#include "emoser/common/errors.hpp"
#include "emoser/specaug/specaug.hpp"

using namespace emoser;
using namespace emoser::specaug;
using frontend::MelSpectrogram;

namespace {

MelSpectrogram ramp(int t, int nu) {
  MelSpectrogram s(t, nu);
  for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] = 1.0f + static_cast<float>(i % 97);
  s.normalized = true;
  return s;
}

}  // namespace

TEST_CASE("presets") {
  const auto c = AugmentationPolicy::conservative();
  CHECK(c.max_freq_width == 15);
  CHECK(c.max_time_width == 50);
  CHECK(c.max_time_fraction == 0.2);
  CHECK(c.num_freq_masks == 2);
  CHECK(c.num_time_masks == 2);
  const auto a = AugmentationPolicy::aggressive();
  CHECK(a.max_freq_width == 27);
  CHECK(a.max_time_width == 70);
  const auto n = AugmentationPolicy::none();
  CHECK(n.max_freq_width == 0);
  CHECK(n.max_time_width == 0);
  CHECK(AugmentationPolicy::preset("aggressive").name == "aggressive");
  CHECK_THROWS_AS(AugmentationPolicy::preset("wild"), ConfigError);
}

TEST_CASE("effective time width") {
  CHECK(effective_time_width(50, 0.2, 100) == 20);
  CHECK(effective_time_width(50, 0.2, 500) == 50);
  CHECK(effective_time_width(0, 0.2, 1000) == 0);
  CHECK(effective_time_width(50, 0.2, 4) == 0);
  CHECK_THROWS(effective_time_width(50, 0.2, 0));
}

TEST_CASE("frequency masks stay in bounds with mean width F/2") {
  Rng rng(1);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto m = sample_frequency_mask(rng, 15, 128);
    REQUIRE(m.axis == MaskAxis::kFrequency);
    REQUIRE(m.width >= 0);
    REQUIRE(m.width <= 15);
    REQUIRE(m.start >= 0);
    REQUIRE(m.start + m.width <= 128);
    sum += m.width;
  }
  CHECK(std::abs(sum / 10000 - 7.5) < 0.3);
  CHECK(sample_frequency_mask(rng, 0, 128).width == 0);
  CHECK_THROWS_AS(sample_frequency_mask(rng, 129, 128), ConfigError);
}

TEST_CASE("time mask boundaries") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto m = sample_time_mask(rng, 20, 100);
    REQUIRE(m.start + m.width <= 100);
    REQUIRE(m.width <= 20);
    const auto one = sample_time_mask(rng, 1, 1);
    REQUIRE(one.start + one.width <= 1);
    REQUIRE(one.width <= 1);
  }
  CHECK(sample_time_mask(rng, 0, 10).width == 0);
  CHECK_THROWS_AS(sample_time_mask(rng, 11, 10), ConfigError);
}

TEST_CASE("none policy is the identity") {
  Rng rng(3);
  const auto s = ramp(120, 128);
  const auto r = apply_masks(s, AugmentationPolicy::none(), rng);
  CHECK(r.spec.data == s.data);
}

TEST_CASE("masked cells are zero, the rest untouched, count bounded") {
  const auto s = ramp(300, 128);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto policy = AugmentationPolicy::conservative();
    const auto r = apply_masks(s, policy, rng);
    REQUIRE(r.masks.size() == 4);
    std::vector<char> covered(s.data.size(), 0);
    for (const auto& m : r.masks) {
      for (int k = m.start; k < m.start + m.width; ++k) {
        if (m.axis == MaskAxis::kFrequency) {
          for (int t = 0; t < s.frames; ++t) covered[std::size_t(t) * s.channels + k] = 1;
        } else {
          for (int c = 0; c < s.channels; ++c) covered[std::size_t(k) * s.channels + c] = 1;
        }
      }
    }
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < s.data.size(); ++i) {
      if (covered[i]) {
        REQUIRE(r.spec.data[i] == 0.0f);
        ++zeros;
      } else {
        REQUIRE(r.spec.data[i] == s.data[i]);
      }
    }
    CHECK(zeros <= std::size_t(2 * 15 * 300 + 2 * 50 * 128));
  }
}

TEST_CASE("fixed seed reproduces; input is unchanged") {
  const auto s = ramp(200, 128);
  const auto copy = s;
  Rng a(77), b(77);
  const auto ra = apply_masks(s, AugmentationPolicy::aggressive(), a);
  const auto rb = apply_masks(s, AugmentationPolicy::aggressive(), b);
  CHECK(ra.spec.data == rb.spec.data);
  CHECK(s.data == copy.data);
}

TEST_CASE("unnormalized input is rejected") {
  auto s = ramp(50, 16);
  s.normalized = false;
  Rng rng(1);
  CHECK_THROWS_AS(apply_masks(s, AugmentationPolicy::conservative(), rng), DataError);
}

TEST_CASE("policy validation") {
  AugmentationPolicy p = AugmentationPolicy::conservative();
  p.max_time_fraction = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = AugmentationPolicy::conservative();
  p.num_freq_masks = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
