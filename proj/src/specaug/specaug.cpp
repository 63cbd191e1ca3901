// src/specaug/specaug.cpp

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

#include "emoser/specaug/specaug.hpp"

#include <algorithm>
#include <cmath>

#include "emoser/common/errors.hpp"

namespace emoser::specaug {

void AugmentationPolicy::validate() const {
  if (max_freq_width < 0 || max_time_width < 0 || num_freq_masks < 0 || num_time_masks < 0) {
    throw ConfigError("augmentation policy '" + name + "': widths and counts must be >= 0");
  }
  if (!(max_time_fraction >= 0.0 && max_time_fraction <= 1.0)) {
    throw ConfigError("augmentation policy '" + name + "': p must lie in [0, 1]");
  }
}

AugmentationPolicy AugmentationPolicy::none() { return {"none", 0, 0, 0.0, 0, 0}; }

AugmentationPolicy AugmentationPolicy::conservative() {
  return {"conservative", 15, 50, 0.2, 2, 2};
}

AugmentationPolicy AugmentationPolicy::aggressive() { return {"aggressive", 27, 70, 0.2, 2, 2}; }

AugmentationPolicy AugmentationPolicy::preset(std::string_view name) {
  if (name == "none") return none();
  if (name == "conservative") return conservative();
  if (name == "aggressive") return aggressive();
  throw ConfigError("unknown augmentation policy '" + std::string(name) +
                    "' (expected none|conservative|aggressive)");
}

std::string_view axis_name(MaskAxis axis) {
  return axis == MaskAxis::kTime ? "time" : "frequency";
}

int effective_time_width(int max_width, double fraction, int frames) {
  if (frames < 1) throw DataError("effective_time_width: T must be >= 1");
  const auto cap = static_cast<int>(std::floor(fraction * frames));
  return std::min(max_width, cap);
}

MaskInstance sample_frequency_mask(Rng& rng, int max_width, int channels) {
  if (max_width > channels) {
    throw ConfigError("frequency mask width F=" + std::to_string(max_width) +
                      " exceeds channel count " + std::to_string(channels));
  }
  MaskInstance m{MaskAxis::kFrequency, 0, 0};
  m.width = static_cast<int>(rng.uniform_int(0, max_width));
  m.start = static_cast<int>(rng.uniform_int(0, channels - m.width));
  return m;
}

MaskInstance sample_time_mask(Rng& rng, int effective_width, int frames) {
  if (effective_width > frames) {
    throw ConfigError("time mask width " + std::to_string(effective_width) +
                      " exceeds frame count " + std::to_string(frames));
  }
  MaskInstance m{MaskAxis::kTime, 0, 0};
  m.width = static_cast<int>(rng.uniform_int(0, effective_width));
  m.start = static_cast<int>(rng.uniform_int(0, frames - m.width));
  return m;
}

AugmentResult apply_masks(const frontend::MelSpectrogram& spec, const AugmentationPolicy& policy,
                          Rng& rng) {
  policy.validate();
  if (!spec.normalized) throw DataError("apply_masks: masks are applied to normalized spectrograms");
  AugmentResult result{spec, {}};
  auto& out = result.spec;
  result.masks.reserve(policy.num_freq_masks + policy.num_time_masks);

  for (int i = 0; i < policy.num_freq_masks; ++i) {
    const auto m = sample_frequency_mask(rng, policy.max_freq_width, spec.channels);
    for (int t = 0; t < out.frames; ++t) {
      std::fill_n(out.data.begin() + std::size_t(t) * out.channels + m.start, m.width, 0.0f);
    }
    result.masks.push_back(m);
  }
  const int w_eff = effective_time_width(policy.max_time_width, policy.max_time_fraction, spec.frames);
  for (int i = 0; i < policy.num_time_masks; ++i) {
    const auto m = sample_time_mask(rng, w_eff, spec.frames);
    std::fill_n(out.data.begin() + std::size_t(m.start) * out.channels,
                std::size_t(m.width) * out.channels, 0.0f);
    result.masks.push_back(m);
  }
  return result;
}

}  // namespace emoser::specaug
