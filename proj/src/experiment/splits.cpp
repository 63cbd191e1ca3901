// src/experiment/splits.cpp

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

#include "emoser/experiment/splits.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "emoser/common/errors.hpp"
#include "emoser/common/rng.hpp"

namespace emoser::experiment {

std::vector<Fold> loso_splits(const std::vector<SegmentRecord>& records, int expected_sessions) {
  std::set<std::string> sessions;
  for (const auto& r : records) sessions.insert(r.session);
  const int n = static_cast<int>(sessions.size());
  if (expected_sessions > 0 && n != expected_sessions) {
    throw DataError("LOSO expects " + std::to_string(expected_sessions) + " sessions, manifest has " +
                    std::to_string(n));
  }
  if (n < 2) throw DataError("LOSO needs at least 2 sessions");

  std::vector<Fold> folds;
  int index = 0;
  for (const auto& s : sessions) {
    Fold f;
    f.index = index++;
    f.held_out = s;
    for (std::size_t i = 0; i < records.size(); ++i) {
      (records[i].session == s ? f.test : f.train).push_back(i);
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

std::vector<Fold> kfold_splits(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2, got " + std::to_string(k));
  if (labels.size() < static_cast<std::size_t>(k)) throw DataError("k-fold: fewer records than folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, members] : by_class) {
    if (members.size() < static_cast<std::size_t>(k)) {
      throw DataError("k-fold: class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                      " members, fewer than k=" + std::to_string(k));
    }
  }

  Rng rng(derive_seed(seed, "kfold"));
  std::vector<int> assignment(labels.size());
  int deal = 0;
  for (auto& [label, members] : by_class) {
    rng.shuffle(members.begin(), members.end());
    for (std::size_t idx : members) {
      assignment[idx] = deal;
      deal = (deal + 1) % k;
    }
  }

  std::vector<Fold> folds(k);
  for (int f = 0; f < k; ++f) {
    folds[f].index = f;
    folds[f].held_out = "kfold-" + std::to_string(f);
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int f = 0; f < k; ++f) (assignment[i] == f ? folds[f].test : folds[f].train).push_back(i);
  }
  return folds;
}

}  // namespace emoser::experiment
