// include/emoser/model/resnet.hpp

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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emoser/frontend/log_mel.hpp"
#include "emoser/tensor/ops.hpp"
#include "emoser/tensor/tensor.hpp"

namespace emoser::model {

using FloatTensor = tensor::Tensor<float>;

enum class Pooling {
  kStatistics,       // mean ++ std over frames
  kMeanOnly,         // mean over frames
  kNoneFixedLength,  // input cut/padded to a fixed length, then mean
};

std::string_view pooling_name(Pooling p);
Pooling parse_pooling(std::string_view name);

// Frames the none_fixed_length variant truncates or zero-pads every input to.
inline constexpr int kFixedLengthFrames = 300;

struct StemConfig {
  int kernel = 3;
  int stride = 1;
  bool max_pool = false;  // 3x3, stride 2, pad 1

  bool operator==(const StemConfig&) const = default;
};

struct ResNetConfig {
  std::string preset = "lite";
  std::array<int, 4> blocks{1, 1, 1, 1};
  std::array<int, 4> channels{8, 16, 32, 64};
  std::array<int, 4> strides{2, 2, 2, 2};  // first block of each stage, both axes
  StemConfig stem{3, 2, false};
  int head_hidden = 256;
  int n_mels = 128;

  // blocks [3,4,6,3], 32-64-128-256 channels, 7x7/2 stem + max-pool.
  static ResNetConfig paper();
  // blocks [1,1,1,1], 8-16-32-64 channels, 3x3/2 stem; sized for CPU runs.
  static ResNetConfig lite();
  static ResNetConfig from_preset(std::string_view name);

  int base_channels() const { return channels[0]; }
  int final_channels() const { return channels[3]; }
  // Product of time-axis strides; shorter inputs are rejected by forward.
  int min_input_frames() const;
  void validate() const;

  bool operator==(const ResNetConfig&) const = default;
};

struct Conv {
  FloatTensor weight;  // O x C x k x k
  tensor::Conv2dParams params;
};

struct BatchNorm {
  FloatTensor gamma;
  FloatTensor beta;
  std::vector<float> running_mean;
  std::vector<float> running_var;
};

struct PRelu {
  FloatTensor slope;
};

struct Linear {
  FloatTensor weight;  // out x in
  FloatTensor bias;
};

// conv-BN-PReLU-conv-BN, plus a projection shortcut when the shape changes,
// then PReLU after the residual add.
struct ResidualBlock {
  Conv conv1;
  BatchNorm bn1;
  PRelu act1;
  Conv conv2;
  BatchNorm bn2;
  std::optional<Conv> proj;
  std::optional<BatchNorm> proj_bn;
  PRelu act_out;
};

struct Head {
  Linear fc1;
  BatchNorm bn;
  PRelu act;
  Linear fc2;
};

struct NamedParameter {
  std::string name;
  FloatTensor tensor;
  bool backbone;
};

struct NamedBuffer {
  std::string name;
  std::vector<float>* values;
  bool backbone;
};

// Frame-level residual conv backbone, frequency collapse, pooling over
// frames and a two-layer FC head.
class EmotionClassifier {
 public:
  // He (fan-in) normal init for conv/linear weights, zero biases, PReLU
  // slopes 0.25, BN gamma 1 / beta 0 / running mean 0 / running var 1.
  static EmotionClassifier build(const ResNetConfig& config, Pooling pooling, int n_classes,
                                 std::uint64_t seed);

  // Parameters are shared handles, so copies are explicit.
  EmotionClassifier(EmotionClassifier&&) = default;
  EmotionClassifier& operator=(EmotionClassifier&&) = default;
  EmotionClassifier(const EmotionClassifier&) = delete;
  EmotionClassifier& operator=(const EmotionClassifier&) = delete;

  // Deep copy: parameters, BN statistics and the frozen flag.
  EmotionClassifier clone() const;

  // batch: N x 1 x n_mels x T. Training mode uses batch statistics in the
  // BN layers, except in the backbone while it is frozen.
  FloatTensor forward(const FloatTensor& batch, bool training);

  // Eval-mode logits for one normalized spectrogram of any length >= the
  // minimum.
  std::vector<float> logits(const frontend::MelSpectrogram& spec);

  // Pooled segment-level embedding (head input) in eval mode.
  std::vector<float> embedding(const frontend::MelSpectrogram& spec);

  // New randomly initialized head for n_classes. The backbone and its BN
  // statistics are untouched. A new pooling mode may be given, which also
  // resizes the head input.
  void replace_head(int n_classes, std::uint64_t seed, std::optional<Pooling> pooling = {});

  void freeze_backbone();
  void unfreeze_backbone();
  bool backbone_frozen() const { return frozen_; }

  const ResNetConfig& config() const { return config_; }
  Pooling pooling() const { return pooling_; }
  int n_classes() const { return n_classes_; }
  int head_input_width() const;

  std::vector<NamedParameter> named_parameters();
  std::vector<NamedBuffer> named_buffers();
  std::vector<FloatTensor> parameters();
  std::vector<FloatTensor> head_parameters();

  // FNV-1a over the bytes of every backbone parameter and BN buffer.
  std::uint64_t backbone_checksum();
  std::uint64_t head_checksum();

 private:
  EmotionClassifier() = default;
  void init_head(std::uint64_t seed);
  FloatTensor backbone_forward(const FloatTensor& batch, bool training);
  FloatTensor pool_and_head(const FloatTensor& frames, bool training);

  ResNetConfig config_;
  Pooling pooling_ = Pooling::kStatistics;
  int n_classes_ = 0;
  bool frozen_ = false;
  Conv stem_conv_;
  BatchNorm stem_bn_;
  PRelu stem_act_;
  std::vector<std::vector<ResidualBlock>> stages_;
  Head head_;
};

// Stacks equal-length normalized spectrograms into an N x 1 x n_mels x T
// tensor (frequency on the H axis, time on W).
FloatTensor make_input_batch(const std::vector<frontend::MelSpectrogram>& chunks);

// Cuts or right-pads (with zeros) a spectrogram to exactly `frames`.
frontend::MelSpectrogram fit_length(const frontend::MelSpectrogram& spec, int frames);

}  // namespace emoser::model
