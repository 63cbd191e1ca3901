// include/emoser/experiment/batching.hpp

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

#include "emoser/common/rng.hpp"
#include "emoser/frontend/log_mel.hpp"
#include "emoser/specaug/specaug.hpp"

namespace emoser::experiment {

// One training sample: a segment and the policy applied to it. policy -1
// is the unmodified original.
struct PoolEntry {
  std::size_t segment = 0;
  int policy = -1;
};

// Originals, plus one entry per policy per segment when augmenting.
std::vector<PoolEntry> build_training_pool(std::span<const std::size_t> segments, bool augment,
                                           int num_policies);

// Random-offset chunk of exactly `frames` frames. Segments shorter than
// that are copied whole and zero-padded on the right.
frontend::MelSpectrogram extract_chunk(const frontend::MelSpectrogram& spec, int frames, Rng& rng);

struct Batch {
  int chunk_frames = 0;
  std::vector<frontend::MelSpectrogram> chunks;
  std::vector<int> labels;
};

// Draws one chunk length for the whole batch from `chunk_set`, cuts a chunk
// per entry and applies that entry's masks (drawn fresh on every call).
Batch make_batch(std::span<const PoolEntry> entries, const std::vector<frontend::MelSpectrogram>& features,
                 const std::vector<int>& labels, const std::vector<specaug::AugmentationPolicy>& policies,
                 const std::vector<int>& chunk_set, Rng& rng);

}  // namespace emoser::experiment
