// include/emoser/experiment/features.hpp

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
#include <vector>

#include "emoser/experiment/manifest.hpp"
#include "emoser/frontend/log_mel.hpp"
#include "emoser/frontend/wav.hpp"

namespace emoser::experiment {

// Normalized log-mel features of one segment.
frontend::MelSpectrogram extract_normalized(const frontend::AudioSegment& audio,
                                            const frontend::FrontendConfig& config);

// Loads and featurizes every record, segments in parallel. Failures are
// collected and reported together as one DataError listing each bad row.
std::vector<frontend::MelSpectrogram> extract_features(const std::vector<SegmentRecord>& records,
                                                       const frontend::FrontendConfig& config);

std::vector<frontend::MelSpectrogram> extract_features(const std::vector<frontend::AudioSegment>& audio,
                                                       const frontend::FrontendConfig& config);

// Features plus labels under one experiment definition.
struct Dataset {
  std::vector<SegmentRecord> records;
  std::vector<frontend::MelSpectrogram> features;
  std::vector<int> labels;
  std::vector<std::string> class_names;

  std::size_t size() const { return records.size(); }
};

Dataset make_dataset(std::vector<SegmentRecord> records, std::vector<frontend::MelSpectrogram> features,
                     const ExperimentDef& def);

}  // namespace emoser::experiment
