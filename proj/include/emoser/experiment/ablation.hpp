// include/emoser/experiment/ablation.hpp

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

#include <json.hpp>

#include "emoser/experiment/trainer.hpp"

namespace emoser::experiment {

struct AblationCell {
  bool transfer_learning = false;
  bool augmentation = false;
  bool statistics_pooling = false;
  model::Pooling pooling = model::Pooling::kStatistics;
  std::vector<metrics::MetricsReport> folds;
  double wa_mean = 0.0;
  double wa_std = 0.0;
  double ua_mean = 0.0;
  double ua_std = 0.0;

  std::string label() const;  // e.g. "TL+Aug+SP", "none"
};

struct AblationReport {
  std::vector<AblationCell> cells;  // index = 4*TL + 2*Aug + SP
  model::Pooling no_sp_pooling = model::Pooling::kMeanOnly;
  // The four no-SP cells rerun with the other substitute; empty unless requested.
  std::vector<AblationCell> alternate_cells;

  const AblationCell& cell(bool tl, bool aug, bool sp) const;
};

// All 8 {TL, Aug, SP} combinations over the same folds. Cells without SP
// use `no_sp_pooling`; TL cells start from `pretrained`. The base config's
// flags and pooling are overridden per cell.
AblationReport run_ablation(const TrainConfig& base, const Dataset& data, const std::vector<Fold>& folds,
                            const model::EmotionClassifier& pretrained,
                            model::Pooling no_sp_pooling = model::Pooling::kMeanOnly,
                            const ProgressFn& progress = {}, bool both_substitutes = false);

nlohmann::json ablation_json(const AblationReport& report);

// One row per cell: flags, WA mean +- std, UA mean +- std (percent).
std::string ablation_table(const AblationReport& report);

}  // namespace emoser::experiment
