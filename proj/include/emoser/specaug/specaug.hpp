// include/emoser/specaug/specaug.hpp

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

#include <string>
#include <string_view>
#include <vector>

#include "emoser/common/rng.hpp"
#include "emoser/frontend/log_mel.hpp"

namespace emoser::specaug {

struct AugmentationPolicy {
  std::string name = "none";
  int max_freq_width = 0;   // F
  int max_time_width = 0;   // W
  double max_time_fraction = 0.0;  // p
  int num_freq_masks = 0;   // N_f
  int num_time_masks = 0;   // N_t

  void validate() const;

  static AugmentationPolicy none();
  static AugmentationPolicy conservative();  // F=15 W=50 p=0.2 Nf=2 Nt=2
  static AugmentationPolicy aggressive();    // F=27 W=70 p=0.2 Nf=2 Nt=2

  // "none" | "conservative" | "aggressive"; ConfigError otherwise.
  static AugmentationPolicy preset(std::string_view name);
};

enum class MaskAxis { kTime, kFrequency };

struct MaskInstance {
  MaskAxis axis = MaskAxis::kTime;
  int start = 0;
  int width = 0;
};

std::string_view axis_name(MaskAxis axis);

// min(W, floor(p * T)).
int effective_time_width(int max_width, double fraction, int frames);

// Width uniform on {0..F}, start uniform on {0..nu-width}.
MaskInstance sample_frequency_mask(Rng& rng, int max_width, int channels);

// Width uniform on {0..W_eff}, start uniform on {0..T-width}.
MaskInstance sample_time_mask(Rng& rng, int effective_width, int frames);

struct AugmentResult {
  frontend::MelSpectrogram spec;
  std::vector<MaskInstance> masks;
};

// Draws N_f frequency masks then N_t time masks and zeroes the covered
// cells of a copy of `spec`. Requires a normalized spectrogram.
AugmentResult apply_masks(const frontend::MelSpectrogram& spec, const AugmentationPolicy& policy,
                          Rng& rng);

}  // namespace emoser::specaug
