// src/experiment/trainer.cpp

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

#include "emoser/experiment/trainer.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "emoser/common/errors.hpp"
#include "emoser/common/rng.hpp"
#include "emoser/experiment/batching.hpp"
#include "emoser/specaug/specaug.hpp"
#include "emoser/tensor/ops.hpp"

namespace emoser::experiment {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (chunk_frames.empty()) throw ConfigError("train.chunk_frames must not be empty");
  for (int t : chunk_frames) {
    if (t < 1) throw ConfigError("train.chunk_frames entries must be >= 1");
  }
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("train.momentum must be in [0, 1)");
  if (!(schedule.initial > 0.0)) throw ConfigError("train.lr must be > 0");
  if (schedule.halving_period < 1) throw ConfigError("train.lr_halving_period must be >= 1");
  if (use_augmentation && policies.empty()) throw ConfigError("augmentation enabled with no policies");
  for (const auto& p : policies) specaug::AugmentationPolicy::preset(p);
  model::ResNetConfig::from_preset(model_preset);
}

std::vector<EpochStats> fit(model::EmotionClassifier& model, const Dataset& data,
                            std::span<const std::size_t> train, const TrainConfig& config,
                            std::uint64_t stream_seed, const ProgressFn& progress) {
  config.validate();
  if (train.empty()) throw DataError("training set is empty");

  std::vector<specaug::AugmentationPolicy> policies;
  for (const auto& name : config.policies) policies.push_back(specaug::AugmentationPolicy::preset(name));

  tensor::SgdMomentum optimizer(model.parameters(), config.momentum);
  std::vector<EpochStats> history;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr = config.schedule.lr_at_epoch(epoch);
    optimizer.set_lr(lr);

    auto pool = build_training_pool(train, config.use_augmentation, static_cast<int>(policies.size()));
    Rng shuffle_rng(derive_seed(stream_seed, "epoch.shuffle", epoch));
    shuffle_rng.shuffle(pool.begin(), pool.end());
    Rng batch_rng(derive_seed(stream_seed, "epoch.batches", epoch));

    double loss_sum = 0.0;
    std::size_t seen = 0;
    std::size_t correct = 0;
    const std::size_t bs = static_cast<std::size_t>(config.batch_size);
    for (std::size_t begin = 0; begin < pool.size(); begin += bs) {
      const std::size_t count = std::min(bs, pool.size() - begin);
      // A lone trailing sample would give the head's batch norm zero variance.
      if (count == 1 && pool.size() > 1) break;
      const std::span<const PoolEntry> entries(pool.data() + begin, count);
      Batch batch = make_batch(entries, data.features, data.labels, policies, config.chunk_frames, batch_rng);

      const auto logits = model.forward(model::make_input_batch(batch.chunks), true);
      auto loss = tensor::softmax_cross_entropy(logits, std::span<const int>(batch.labels));
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                           std::to_string(begin));
      }
      optimizer.zero_grad();
      loss.backward();
      optimizer.step();

      const int k = logits.shape()[1];
      const auto& out = logits.data();
      for (std::size_t i = 0; i < count; ++i) {
        const float* row = out.data() + i * k;
        const int pred = static_cast<int>(std::max_element(row, row + k) - row);
        if (pred == batch.labels[i]) ++correct;
      }
      loss_sum += value * static_cast<double>(count);
      seen += count;
    }

    EpochStats stats{epoch, lr, loss_sum / static_cast<double>(seen),
                     static_cast<double>(correct) / static_cast<double>(seen)};
    history.push_back(stats);
    if (progress) {
      std::ostringstream msg;
      msg << "epoch " << epoch << "/" << config.epochs << "  lr " << lr << "  loss " << stats.loss
          << "  train_wa " << stats.train_wa;
      progress(msg.str());
    }
  }
  return history;
}

EvalResult evaluate(model::EmotionClassifier& model, const Dataset& data, std::span<const std::size_t> test) {
  if (test.empty()) throw DataError("evaluation set is empty");
  tensor::NoGradGuard no_grad;
  EvalResult result;
  result.confusion = metrics::ConfusionMatrix(data.class_names);
  const int minimum = model.config().min_input_frames();
  for (std::size_t idx : test) {
    const auto& spec = data.features.at(idx);
    std::vector<float> logits;
    if (spec.frames < minimum) {
      result.padded_ids.push_back(data.records[idx].id);
      logits = model.logits(model::fit_length(spec, minimum));
    } else {
      logits = model.logits(spec);
    }
    int pred = 0;
    for (int k = 1; k < static_cast<int>(logits.size()); ++k) {
      if (logits[k] > logits[pred]) pred = k;
    }
    result.confusion.accumulate(data.labels[idx], pred);
    result.predictions.push_back({data.records[idx].id, data.labels[idx], pred, std::move(logits)});
  }
  return result;
}

PretrainResult pretrain_speaker(const Dataset& speakers, const TrainConfig& config, const ProgressFn& progress) {
  config.validate();
  if (speakers.class_names.size() < 2) {
    throw DataError("speaker pretraining needs at least 2 speakers, manifest has " +
                    std::to_string(speakers.class_names.size()));
  }
  auto model = model::EmotionClassifier::build(model::ResNetConfig::from_preset(config.model_preset),
                                               config.pooling, static_cast<int>(speakers.class_names.size()),
                                               derive_seed(config.seed, "pretrain.init"));
  std::vector<std::size_t> all(speakers.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  auto history = fit(model, speakers, all, config, derive_seed(config.seed, "pretrain.train"), progress);
  return {std::move(model), std::move(history)};
}

model::EmotionClassifier initial_model(const TrainConfig& config, int n_classes, int fold_index,
                                       const model::EmotionClassifier* pretrained) {
  const auto arch = model::ResNetConfig::from_preset(config.model_preset);
  if (!config.use_transfer_learning) {
    return model::EmotionClassifier::build(arch, config.pooling, n_classes,
                                           derive_seed(config.seed, "fold.init", fold_index));
  }
  if (pretrained == nullptr) throw ConfigError("transfer learning requires a pretrained checkpoint");
  if (!(pretrained->config() == arch)) {
    throw ConfigError("pretrained checkpoint architecture (preset " + pretrained->config().preset +
                      ") does not match model preset " + config.model_preset);
  }
  auto model = pretrained->clone();
  model.replace_head(n_classes, derive_seed(config.seed, "fold.head", fold_index), config.pooling);
  if (config.fine_tune) {
    model.unfreeze_backbone();
  } else {
    model.freeze_backbone();
  }
  return model;
}

std::vector<FoldResult> train_emotion(const TrainConfig& config, const Dataset& data,
                                      const std::vector<Fold>& folds,
                                      const model::EmotionClassifier* pretrained, const ProgressFn& progress) {
  config.validate();
  if (data.size() == 0) throw DataError("dataset is empty");
  const int n_mels = model::ResNetConfig::from_preset(config.model_preset).n_mels;
  if (data.features.front().channels != n_mels) {
    throw DataError("features have " + std::to_string(data.features.front().channels) +
                    " mel channels, model expects " + std::to_string(n_mels));
  }
  const int n_classes = static_cast<int>(data.class_names.size());
  std::vector<FoldResult> results;
  for (const Fold& fold : folds) {
    if (fold.train.empty() || fold.test.empty()) {
      throw DataError("fold " + std::to_string(fold.index) + " (" + fold.held_out + ") has an empty " +
                      (fold.train.empty() ? "training" : "test") + " set");
    }
    if (progress) progress("fold " + std::to_string(fold.index) + " held out: " + fold.held_out);
    auto model = initial_model(config, n_classes, fold.index, pretrained);
    auto history = fit(model, data, fold.train, config, derive_seed(config.seed, "fold.train", fold.index),
                       progress);
    auto eval = evaluate(model, data, fold.test);
    auto report = metrics::make_report(eval.confusion, fold.index);
    if (progress) {
      progress(metrics::format_result_row("fold " + std::to_string(fold.index), report.ua, report.wa));
    }
    results.push_back({fold, std::move(model), std::move(history), std::move(eval), std::move(report)});
  }
  return results;
}

std::vector<metrics::MetricsReport> fold_reports(const std::vector<FoldResult>& results) {
  std::vector<metrics::MetricsReport> reports;
  for (const auto& r : results) reports.push_back(r.report);
  return reports;
}

std::string predictions_csv(const std::vector<Prediction>& predictions,
                            const std::vector<std::string>& class_names) {
  std::string out = "id,true,pred";
  for (const auto& name : class_names) out += ",logit_" + name;
  out += '\n';
  char buf[32];
  for (const auto& p : predictions) {
    out += p.id + ',' + class_names.at(p.true_label) + ',' + class_names.at(p.predicted);
    for (float v : p.logits) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out += ',';
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

}  // namespace emoser::experiment
