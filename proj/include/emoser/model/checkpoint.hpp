// include/emoser/model/checkpoint.hpp

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
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "emoser/common/errors.hpp"
#include "emoser/model/resnet.hpp"

namespace emoser::model {

// On-disk layout:
//   8 bytes  magic "EMOCKPT1"
//   u32      format version
//   u64      length of the JSON metadata in bytes
//   JSON     {config, pooling, n_classes, metadata, tensors:[{name, shape, offset}]}
//   blobs    little-endian f32, in the order listed under "tensors"
inline constexpr char kCheckpointMagic[8] = {'E', 'M', 'O', 'C', 'K', 'P', 'T', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMetadata {
  std::string task;  // "speaker" or "emotion"
  std::vector<std::string> class_names;
  int epoch = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> policies;
  nlohmann::json extra = nlohmann::json::object();
};

class CheckpointError : public DataError {
 public:
  enum class Kind { kBadMagic, kVersionMismatch, kTruncated, kShapeMismatch, kMalformed };
  CheckpointError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct LoadedCheckpoint {
  EmotionClassifier model;
  CheckpointMetadata metadata;
};

void save_checkpoint(EmotionClassifier& model, const CheckpointMetadata& metadata,
                     const std::filesystem::path& path);

// When `expected` is given the model is built from it and every stored
// tensor must match its shape; otherwise the stored config is used.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 const ResNetConfig* expected = nullptr);

nlohmann::json config_to_json(const ResNetConfig& config);
ResNetConfig config_from_json(const nlohmann::json& j);

}  // namespace emoser::model
