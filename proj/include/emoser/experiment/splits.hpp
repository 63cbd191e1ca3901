// include/emoser/experiment/splits.hpp

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
#include <string>
#include <vector>

#include "emoser/experiment/manifest.hpp"

namespace emoser::experiment {

struct Fold {
  int index = 0;
  std::string held_out;  // session name for LOSO, "kfold-i" otherwise
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// One fold per session, sessions in sorted order. expected_sessions = 0
// accepts any count >= 2.
std::vector<Fold> loso_splits(const std::vector<SegmentRecord>& records, int expected_sessions = 5);

// Label-stratified k folds: each class is shuffled and dealt round-robin,
// continuing the deal position from one class to the next so fold sizes
// stay balanced too.
std::vector<Fold> kfold_splits(const std::vector<int>& labels, int k, std::uint64_t seed);

}  // namespace emoser::experiment
