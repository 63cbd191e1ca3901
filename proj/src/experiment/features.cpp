// src/experiment/features.cpp

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

#include "emoser/experiment/features.hpp"

#include <exception>

#include "emoser/common/errors.hpp"

namespace emoser::experiment {

frontend::MelSpectrogram extract_normalized(const frontend::AudioSegment& audio,
                                            const frontend::FrontendConfig& config) {
  return frontend::normalize_segment(frontend::log_mel(audio, config), config.norm_epsilon);
}

std::vector<frontend::MelSpectrogram> extract_features(const std::vector<SegmentRecord>& records,
                                                       const frontend::FrontendConfig& config) {
  std::vector<frontend::MelSpectrogram> out(records.size());
  std::vector<std::string> errors(records.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(records.size()); ++i) {
    try {
      auto audio = frontend::load_wav(records[i].path);
      audio.id = records[i].id;
      out[i] = extract_normalized(audio, config);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  std::string listing;
  int bad = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (errors[i].empty()) continue;
    ++bad;
    listing += "\n  row " + std::to_string(i + 1) + " (" + records[i].id + "): " + errors[i];
  }
  if (bad) throw DataError(std::to_string(bad) + " segment(s) failed feature extraction:" + listing);
  return out;
}

std::vector<frontend::MelSpectrogram> extract_features(const std::vector<frontend::AudioSegment>& audio,
                                                       const frontend::FrontendConfig& config) {
  std::vector<frontend::MelSpectrogram> out(audio.size());
  std::vector<std::exception_ptr> errors(audio.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(audio.size()); ++i) {
    try {
      out[i] = extract_normalized(audio[i], config);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Dataset make_dataset(std::vector<SegmentRecord> records, std::vector<frontend::MelSpectrogram> features,
                     const ExperimentDef& def) {
  if (records.size() != features.size()) throw DataError("make_dataset: records and features differ in size");
  Dataset d;
  d.labels = label_indices(records, def);
  d.records = std::move(records);
  d.features = std::move(features);
  d.class_names = def.classes;
  return d;
}

}  // namespace emoser::experiment
