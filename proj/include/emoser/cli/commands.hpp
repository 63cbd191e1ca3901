// include/emoser/cli/commands.hpp

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
#include <iosfwd>
#include <optional>
#include <string>

#include "emoser/experiment/run_config.hpp"
#include "emoser/frontend/spec_io.hpp"

namespace emoser::cli {

namespace fs = std::filesystem;

// Defaults, then the config file (if any), then EMOSER_SEED, then an
// explicit --seed.
experiment::RunConfig resolve_config(const std::string& config_path,
                                     std::optional<std::uint64_t> seed_override = {});

// Writes config.txt into `dir` (created if needed).
void write_snapshot(const fs::path& dir, const experiment::RunConfig& config);

void cmd_synth(const experiment::RunConfig& config, const fs::path& out_dir, std::ostream& log);

// One dump per manifest row, named <id>.spec.
void cmd_extract(const experiment::RunConfig& config, const fs::path& manifest, const fs::path& out_dir,
                 frontend::DumpFormat format, std::ostream& log);

// Writes the masked dump to `out` (same format as the input) and the masks
// to `out` + ".masks.json".
void cmd_augment(const fs::path& in, const std::string& policy, std::uint64_t seed, const fs::path& out,
                 std::ostream& log);

// Speaker pretraining; the history and config snapshot go next to the checkpoint.
void cmd_pretrain(const experiment::RunConfig& config, const fs::path& manifest, const fs::path& checkpoint,
                  std::ostream& log);

// Cross-validated emotion training. A non-empty `pretrained` switches on
// the transfer-learning path.
void cmd_train(experiment::RunConfig config, const fs::path& manifest, const fs::path& pretrained,
               const fs::path& out_dir, std::ostream& log);

void cmd_eval(const fs::path& checkpoint, const fs::path& manifest, const fs::path& out_dir, std::ostream& log);

void cmd_ablate(experiment::RunConfig config, const fs::path& manifest, const fs::path& pretrained,
                const fs::path& out_dir, std::ostream& log);

void cmd_report(const fs::path& run_dir, std::ostream& out);

// Parses argv, dispatches and maps failures to exit codes.
int run_cli(int argc, char** argv);

}  // namespace emoser::cli
