// src/experiment/batching.cpp

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

#include "emoser/experiment/batching.hpp"

#include <algorithm>

#include "emoser/common/errors.hpp"

namespace emoser::experiment {

std::vector<PoolEntry> build_training_pool(std::span<const std::size_t> segments, bool augment,
                                           int num_policies) {
  std::vector<PoolEntry> pool;
  pool.reserve(segments.size() * (augment ? 1 + num_policies : 1));
  for (std::size_t s : segments) {
    pool.push_back({s, -1});
    if (augment) {
      for (int p = 0; p < num_policies; ++p) pool.push_back({s, p});
    }
  }
  return pool;
}

frontend::MelSpectrogram extract_chunk(const frontend::MelSpectrogram& spec, int frames, Rng& rng) {
  if (frames < 1) throw ConfigError("chunk length must be >= 1");
  frontend::MelSpectrogram out(frames, spec.channels);
  out.normalized = spec.normalized;
  if (spec.frames >= frames) {
    const auto offset = rng.uniform_int(0, spec.frames - frames);
    std::copy_n(spec.data.begin() + offset * spec.channels, std::size_t(frames) * spec.channels,
                out.data.begin());
  } else {
    std::copy(spec.data.begin(), spec.data.end(), out.data.begin());
  }
  return out;
}

Batch make_batch(std::span<const PoolEntry> entries, const std::vector<frontend::MelSpectrogram>& features,
                 const std::vector<int>& labels, const std::vector<specaug::AugmentationPolicy>& policies,
                 const std::vector<int>& chunk_set, Rng& rng) {
  if (chunk_set.empty()) throw ConfigError("chunk length set is empty");
  if (entries.empty()) throw DataError("make_batch: no entries");
  Batch batch;
  batch.chunk_frames = chunk_set[rng.uniform_int(0, static_cast<std::int64_t>(chunk_set.size()) - 1)];
  batch.chunks.reserve(entries.size());
  for (const auto& e : entries) {
    auto chunk = extract_chunk(features.at(e.segment), batch.chunk_frames, rng);
    if (e.policy >= 0) chunk = specaug::apply_masks(chunk, policies.at(e.policy), rng).spec;
    batch.chunks.push_back(std::move(chunk));
    batch.labels.push_back(labels.at(e.segment));
  }
  return batch;
}

}  // namespace emoser::experiment
