// include/emoser/frontend/wav.hpp

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

#include <filesystem>
#include <string>
#include <vector>

namespace emoser::frontend {

struct AudioSegment {
  std::vector<float> samples;  // in [-1, 1]
  int sample_rate = 0;
  std::string id;

  // Throws DataError unless sample_rate > 0, samples non-empty and finite.
  void validate() const;
};

// Reads a RIFF/WAVE file holding 16-bit PCM mono audio. Multi-channel and
// non-16-bit files are rejected with "unsupported format".
AudioSegment load_wav(const std::filesystem::path& path);

// Writes 16-bit PCM mono. Samples are clipped to [-1, 1) and quantized with
// round-to-nearest on the 32768 scale.
void save_wav(const std::filesystem::path& path, const AudioSegment& audio);

}  // namespace emoser::frontend
