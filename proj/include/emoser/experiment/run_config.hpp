// include/emoser/experiment/run_config.hpp

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
#include <string_view>
#include <vector>

#include "emoser/experiment/synth.hpp"
#include "emoser/experiment/trainer.hpp"
#include "emoser/frontend/log_mel.hpp"

namespace emoser::experiment {

// Everything a run needs, as flat `section.key=value` text. Every field has
// a default; unknown keys are rejected.
struct RunConfig {
  frontend::FrontendConfig frontend;
  TrainConfig train;

  std::string experiment = "exp1";
  std::vector<std::string> classes;  // only for experiment=custom
  int sessions = 5;
  std::string protocol = "loso";  // loso | kfold
  int folds = 5;

  model::Pooling no_sp_pooling = model::Pooling::kMeanOnly;
  bool ablation_both_substitutes = true;

  std::string manifest;
  std::string run_dir;
  std::string checkpoint;

  std::uint64_t seed = 1;
  int workers = 0;  // 0 = OpenMP default

  // synth.kind resets `synth` to that kind's defaults, so it is written
  // (and must appear) before the other synth.* keys.
  std::string synth_kind = "emotion";  // emotion | speaker
  SyntheticSpec synth = SyntheticSpec::emotion_default();

  ExperimentDef experiment_def() const;
  void validate() const;
};

// Applies `key=value` lines on top of `base`. '#' starts a comment.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

// Sets one key; throws ConfigError for unknown keys or bad values.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

// Every key in a fixed order; parsing the result reproduces the config.
std::string serialize_run_config(const RunConfig& config);

// EMOSER_SEED, when set, replaces the root seed.
void apply_env_overrides(RunConfig& config);

}  // namespace emoser::experiment
