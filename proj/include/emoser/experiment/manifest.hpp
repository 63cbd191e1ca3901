// include/emoser/experiment/manifest.hpp

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
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace emoser::experiment {

struct SegmentRecord {
  std::string id;
  std::string path;  // resolved against the manifest directory when relative
  std::string label;
  std::string session;
  std::string speaker;
  double duration = 0.0;  // seconds
};

enum class LabelField { kEmotion, kSpeaker };

// Class inventory of an experiment. Labels are mapped through `merge`
// before lookup, so exp3 folds happy and excited into one class.
struct ExperimentDef {
  std::string name = "exp1";
  std::vector<std::string> classes;
  std::map<std::string, std::string> merge;
  LabelField field = LabelField::kEmotion;

  static ExperimentDef exp1();  // angry, happy, neutral, sad
  static ExperimentDef exp2();  // angry, excited, neutral, sad
  static ExperimentDef exp3();  // angry, happy+excited, neutral, sad
  static ExperimentDef custom(std::vector<std::string> classes);
  static ExperimentDef from_name(std::string_view name);
  // One class per distinct speaker, sorted.
  static ExperimentDef speakers(const std::vector<SegmentRecord>& records);

  // -1 when the label is not part of this experiment.
  int class_index(const SegmentRecord& record) const;
  std::string allowed_labels() const;
};

// CSV with header id,path,label,session,speaker,duration (any column
// order). With a definition, every label must belong to it; records whose
// label is excluded are an error, not silently dropped.
std::vector<SegmentRecord> load_manifest(const std::filesystem::path& path,
                                         const ExperimentDef* def = nullptr);

void write_manifest(const std::filesystem::path& path, const std::vector<SegmentRecord>& records,
                    const std::filesystem::path& relative_to = {});

// Label index per record; throws DataError for labels outside `def`.
std::vector<int> label_indices(const std::vector<SegmentRecord>& records, const ExperimentDef& def);

}  // namespace emoser::experiment
