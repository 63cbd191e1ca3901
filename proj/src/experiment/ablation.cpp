// src/experiment/ablation.cpp

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

#include "emoser/experiment/ablation.hpp"

#include <cstdio>

#include "emoser/common/errors.hpp"

namespace emoser::experiment {

std::string AblationCell::label() const {
  std::string s;
  auto add = [&s](const char* part) {
    if (!s.empty()) s += '+';
    s += part;
  };
  if (transfer_learning) add("TL");
  if (augmentation) add("Aug");
  if (statistics_pooling) add("SP");
  return s.empty() ? "none" : s;
}

const AblationCell& AblationReport::cell(bool tl, bool aug, bool sp) const {
  return cells.at(4 * int(tl) + 2 * int(aug) + int(sp));
}

namespace {

AblationCell run_cell(const TrainConfig& base, const Dataset& data, const std::vector<Fold>& folds,
                      const model::EmotionClassifier& pretrained, bool tl, bool aug, model::Pooling pooling,
                      const ProgressFn& progress) {
  AblationCell cell;
  cell.transfer_learning = tl;
  cell.augmentation = aug;
  cell.statistics_pooling = pooling == model::Pooling::kStatistics;
  cell.pooling = pooling;

  TrainConfig config = base;
  config.use_transfer_learning = tl;
  config.use_augmentation = aug;
  config.pooling = pooling;

  if (progress) progress("ablation cell " + cell.label() + " (" + std::string(model::pooling_name(pooling)) + ")");
  const auto results = train_emotion(config, data, folds, &pretrained, progress);
  cell.folds = fold_reports(results);

  std::vector<double> wa, ua;
  for (const auto& r : cell.folds) {
    wa.push_back(r.wa);
    ua.push_back(r.ua);
  }
  cell.wa_mean = metrics::mean_of(wa);
  cell.wa_std = metrics::population_std(wa);
  cell.ua_mean = metrics::mean_of(ua);
  cell.ua_std = metrics::population_std(ua);
  return cell;
}

nlohmann::json cell_json(const AblationCell& c) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& r : c.folds) folds.push_back({{"fold", r.fold}, {"wa", r.wa}, {"ua", r.ua}});
  return {{"label", c.label()},
          {"transfer_learning", c.transfer_learning},
          {"augmentation", c.augmentation},
          {"statistics_pooling", c.statistics_pooling},
          {"pooling", std::string(model::pooling_name(c.pooling))},
          {"wa_mean", c.wa_mean},
          {"wa_std", c.wa_std},
          {"ua_mean", c.ua_mean},
          {"ua_std", c.ua_std},
          {"folds", folds}};
}

void append_row(std::string& out, const AblationCell& c, const char* sp) {
  char line[160];
  std::snprintf(line, sizeof line, "%-4s %-4s %-4s %6.2f +- %5.2f  %6.2f +- %5.2f  %s\n",
                c.transfer_learning ? "on" : "off", c.augmentation ? "on" : "off", sp, 100.0 * c.wa_mean,
                100.0 * c.wa_std, 100.0 * c.ua_mean, 100.0 * c.ua_std,
                std::string(model::pooling_name(c.pooling)).c_str());
  out += line;
}

}  // namespace

AblationReport run_ablation(const TrainConfig& base, const Dataset& data, const std::vector<Fold>& folds,
                            const model::EmotionClassifier& pretrained, model::Pooling no_sp_pooling,
                            const ProgressFn& progress, bool both_substitutes) {
  if (no_sp_pooling == model::Pooling::kStatistics) {
    throw ConfigError("ablation.no_sp_pooling must differ from statistics pooling");
  }
  AblationReport report;
  report.no_sp_pooling = no_sp_pooling;
  for (int code = 0; code < 8; ++code) {
    const auto pooling = (code & 1) ? model::Pooling::kStatistics : no_sp_pooling;
    report.cells.push_back(run_cell(base, data, folds, pretrained, code & 4, code & 2, pooling, progress));
  }
  if (both_substitutes) {
    const auto other = no_sp_pooling == model::Pooling::kMeanOnly ? model::Pooling::kNoneFixedLength
                                                                  : model::Pooling::kMeanOnly;
    for (int code = 0; code < 8; code += 2) {
      report.alternate_cells.push_back(run_cell(base, data, folds, pretrained, code & 4, code & 2, other, progress));
    }
  }
  return report;
}

nlohmann::json ablation_json(const AblationReport& report) {
  nlohmann::json cells = nlohmann::json::array(), alternate = nlohmann::json::array();
  for (const auto& c : report.cells) cells.push_back(cell_json(c));
  for (const auto& c : report.alternate_cells) alternate.push_back(cell_json(c));
  return {{"no_sp_pooling", std::string(model::pooling_name(report.no_sp_pooling))},
          {"cells", cells},
          {"alternate_cells", alternate}};
}

std::string ablation_table(const AblationReport& report) {
  std::string out = "TL   Aug  SP   WA [%]          UA [%]          pooling\n";
  for (const auto& c : report.cells) append_row(out, c, c.statistics_pooling ? "on" : "off");
  for (const auto& c : report.alternate_cells) append_row(out, c, "off");
  return out;
}

}  // namespace emoser::experiment
