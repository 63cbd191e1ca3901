// include/emoser/experiment/trainer.hpp

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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "emoser/experiment/features.hpp"
#include "emoser/experiment/splits.hpp"
#include "emoser/metrics/metrics.hpp"
#include "emoser/model/resnet.hpp"
#include "emoser/tensor/optim.hpp"

namespace emoser::experiment {

struct TrainConfig {
  int batch_size = 32;
  std::vector<int> chunk_frames{150, 200, 250, 300};
  int epochs = 10;
  std::uint64_t seed = 1;
  bool use_transfer_learning = false;
  bool use_augmentation = false;
  bool fine_tune = false;  // TL path: also train the backbone
  model::Pooling pooling = model::Pooling::kStatistics;
  std::vector<std::string> policies{"conservative", "aggressive"};
  std::string model_preset = "lite";
  tensor::LrSchedule schedule;
  double momentum = 0.9;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;      // mean cross-entropy over the epoch's samples
  double train_wa = 0.0;  // accuracy on the training chunks as seen
};

using ProgressFn = std::function<void(const std::string&)>;

// Trains `model` on `train` (indices into data) for config.epochs epochs.
// Every random draw comes from streams derived from `stream_seed`.
std::vector<EpochStats> fit(model::EmotionClassifier& model, const Dataset& data,
                            std::span<const std::size_t> train, const TrainConfig& config,
                            std::uint64_t stream_seed, const ProgressFn& progress = {});

struct Prediction {
  std::string id;
  int true_label = 0;
  int predicted = 0;
  std::vector<float> logits;
};

struct EvalResult {
  std::vector<Prediction> predictions;
  metrics::ConfusionMatrix confusion;
  std::vector<std::string> padded_ids;  // shorter than the model minimum
};

// Full-length forward per segment with BN in eval mode; argmax ties go to
// the lowest class index.
EvalResult evaluate(model::EmotionClassifier& model, const Dataset& data,
                    std::span<const std::size_t> test);

// Speaker-classification pretext task over a speaker-labelled dataset.
struct PretrainResult {
  model::EmotionClassifier model;
  std::vector<EpochStats> history;
};
PretrainResult pretrain_speaker(const Dataset& speakers, const TrainConfig& config,
                                const ProgressFn& progress = {});

struct FoldResult {
  Fold fold;
  model::EmotionClassifier model;
  std::vector<EpochStats> history;
  EvalResult eval;
  metrics::MetricsReport report;
};

// Builds the per-fold starting model: a fresh network, or a clone of
// `pretrained` with a new K-way head (frozen backbone unless fine_tune).
model::EmotionClassifier initial_model(const TrainConfig& config, int n_classes, int fold_index,
                                       const model::EmotionClassifier* pretrained);

std::vector<FoldResult> train_emotion(const TrainConfig& config, const Dataset& data,
                                      const std::vector<Fold>& folds,
                                      const model::EmotionClassifier* pretrained,
                                      const ProgressFn& progress = {});

std::vector<metrics::MetricsReport> fold_reports(const std::vector<FoldResult>& results);

// "id,true,pred,logit_0,..." with class names in the label columns.
std::string predictions_csv(const std::vector<Prediction>& predictions,
                            const std::vector<std::string>& class_names);

}  // namespace emoser::experiment
