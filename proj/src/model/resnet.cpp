// src/model/resnet.cpp

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

#include "emoser/model/resnet.hpp"

#include <cmath>
#include <cstring>

#include "emoser/common/errors.hpp"
#include "emoser/common/rng.hpp"

namespace emoser::model {

namespace {

constexpr double kStdEpsilon = 1e-9;
constexpr float kInitialSlope = 0.25f;

FloatTensor he_normal(tensor::Shape shape, int fan_in, Rng& rng) {
  FloatTensor t(std::move(shape), true);
  const double scale = std::sqrt(2.0 / fan_in);
  for (auto& v : t.data()) v = static_cast<float>(rng.normal() * scale);
  return t;
}

FloatTensor filled(int n, float value, bool requires_grad = true) {
  return FloatTensor({n}, std::vector<float>(n, value), requires_grad);
}

Conv make_conv(int in, int out, int kernel, int stride, Rng& rng) {
  Conv c;
  c.weight = he_normal({out, in, kernel, kernel}, in * kernel * kernel, rng);
  c.params = {stride, stride, kernel / 2, kernel / 2};
  return c;
}

BatchNorm make_bn(int channels) {
  return {filled(channels, 1.0f), filled(channels, 0.0f), std::vector<float>(channels, 0.0f),
          std::vector<float>(channels, 1.0f)};
}

PRelu make_prelu(int channels) { return {filled(channels, kInitialSlope)}; }

Linear make_linear(int in, int out, Rng& rng) {
  return {he_normal({out, in}, in, rng), filled(out, 0.0f)};
}

FloatTensor apply_bn(const FloatTensor& x, BatchNorm& bn, bool training) {
  return tensor::batch_norm(x, bn.gamma, bn.beta, bn.running_mean, bn.running_var,
                            {training, 0.1, 1e-5});
}

FloatTensor apply_conv(const FloatTensor& x, const Conv& c) {
  return tensor::conv2d(x, c.weight, c.params);
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::string_view pooling_name(Pooling p) {
  switch (p) {
    case Pooling::kStatistics: return "statistics";
    case Pooling::kMeanOnly: return "mean_only";
    case Pooling::kNoneFixedLength: return "none_fixed_length";
  }
  return "?";
}

Pooling parse_pooling(std::string_view name) {
  if (name == "statistics") return Pooling::kStatistics;
  if (name == "mean_only") return Pooling::kMeanOnly;
  if (name == "none_fixed_length") return Pooling::kNoneFixedLength;
  throw ConfigError("unknown pooling '" + std::string(name) +
                    "' (expected statistics|mean_only|none_fixed_length)");
}

ResNetConfig ResNetConfig::paper() {
  ResNetConfig c;
  c.preset = "paper";
  c.blocks = {3, 4, 6, 3};
  c.channels = {32, 64, 128, 256};
  c.strides = {1, 2, 2, 2};
  c.stem = {7, 2, true};
  return c;
}

ResNetConfig ResNetConfig::lite() { return ResNetConfig{}; }

ResNetConfig ResNetConfig::from_preset(std::string_view name) {
  if (name == "paper") return paper();
  if (name == "lite") return lite();
  throw ConfigError("unknown model preset '" + std::string(name) + "' (expected paper|lite)");
}

int ResNetConfig::min_input_frames() const {
  int m = stem.stride * (stem.max_pool ? 2 : 1);
  for (int s : strides) m *= s;
  return m;
}

void ResNetConfig::validate() const {
  for (int i = 0; i < 4; ++i) {
    if (blocks[i] < 1) throw ConfigError("resnet: every stage needs >= 1 block");
    if (channels[i] < 1) throw ConfigError("resnet: channel counts must be positive");
    if (strides[i] < 1) throw ConfigError("resnet: strides must be positive");
  }
  if (stem.kernel < 1 || stem.kernel % 2 == 0 || stem.stride < 1) {
    throw ConfigError("resnet: stem kernel must be odd and stride positive");
  }
  if (head_hidden < 1 || n_mels < 1) throw ConfigError("resnet: head_hidden and n_mels must be >= 1");
}

EmotionClassifier EmotionClassifier::build(const ResNetConfig& config, Pooling pooling,
                                           int n_classes, std::uint64_t seed) {
  config.validate();
  if (n_classes < 2) throw ConfigError("model needs at least 2 classes, got " + std::to_string(n_classes));
  EmotionClassifier m;
  m.config_ = config;
  m.pooling_ = pooling;
  m.n_classes_ = n_classes;

  Rng rng(derive_seed(seed, "model.backbone"));
  m.stem_conv_ = make_conv(1, config.channels[0], config.stem.kernel, config.stem.stride, rng);
  m.stem_bn_ = make_bn(config.channels[0]);
  m.stem_act_ = make_prelu(config.channels[0]);

  int in = config.channels[0];
  m.stages_.resize(4);
  for (int s = 0; s < 4; ++s) {
    const int out = config.channels[s];
    for (int b = 0; b < config.blocks[s]; ++b) {
      const int stride = b == 0 ? config.strides[s] : 1;
      ResidualBlock blk;
      blk.conv1 = make_conv(in, out, 3, stride, rng);
      blk.bn1 = make_bn(out);
      blk.act1 = make_prelu(out);
      blk.conv2 = make_conv(out, out, 3, 1, rng);
      blk.bn2 = make_bn(out);
      if (stride != 1 || in != out) {
        blk.proj = make_conv(in, out, 1, stride, rng);
        blk.proj_bn = make_bn(out);
      }
      blk.act_out = make_prelu(out);
      m.stages_[s].push_back(std::move(blk));
      in = out;
    }
  }
  m.init_head(derive_seed(seed, "model.head"));
  return m;
}

EmotionClassifier EmotionClassifier::clone() const {
  auto& self = const_cast<EmotionClassifier&>(*this);
  EmotionClassifier copy = build(config_, pooling_, n_classes_, 0);
  auto src_params = self.named_parameters();
  auto dst_params = copy.named_parameters();
  for (std::size_t i = 0; i < src_params.size(); ++i) {
    std::copy(src_params[i].tensor.data().begin(), src_params[i].tensor.data().end(),
              dst_params[i].tensor.data().begin());
  }
  auto src_buffers = self.named_buffers();
  auto dst_buffers = copy.named_buffers();
  for (std::size_t i = 0; i < src_buffers.size(); ++i) *dst_buffers[i].values = *src_buffers[i].values;
  if (frozen_) copy.freeze_backbone();
  return copy;
}

int EmotionClassifier::head_input_width() const {
  return pooling_ == Pooling::kStatistics ? 2 * config_.final_channels() : config_.final_channels();
}

void EmotionClassifier::init_head(std::uint64_t seed) {
  Rng rng(seed);
  head_.fc1 = make_linear(head_input_width(), config_.head_hidden, rng);
  head_.bn = make_bn(config_.head_hidden);
  head_.act = make_prelu(config_.head_hidden);
  head_.fc2 = make_linear(config_.head_hidden, n_classes_, rng);
}

void EmotionClassifier::replace_head(int n_classes, std::uint64_t seed,
                                     std::optional<Pooling> pooling) {
  if (n_classes < 2) throw ConfigError("model needs at least 2 classes, got " + std::to_string(n_classes));
  n_classes_ = n_classes;
  if (pooling) pooling_ = *pooling;
  init_head(seed);
}

void EmotionClassifier::freeze_backbone() {
  for (auto& p : named_parameters()) {
    if (p.backbone) p.tensor.set_requires_grad(false);
  }
  frozen_ = true;
}

void EmotionClassifier::unfreeze_backbone() {
  for (auto& p : named_parameters()) {
    if (p.backbone) p.tensor.set_requires_grad(true);
  }
  frozen_ = false;
}

FloatTensor EmotionClassifier::backbone_forward(const FloatTensor& batch, bool training) {
  if (batch.rank() != 4 || batch.dim(1) != 1 || batch.dim(2) != config_.n_mels) {
    throw DataError("model input must be N x 1 x " + std::to_string(config_.n_mels) +
                    " x T, got " + tensor::shape_str(batch.shape()));
  }
  const int min_t = config_.min_input_frames();
  if (batch.dim(3) < min_t) {
    throw DataError("input of " + std::to_string(batch.dim(3)) +
                    " frames is below the model minimum of " + std::to_string(min_t) + " frames");
  }
  const bool bn_train = training && !frozen_;
  FloatTensor x = apply_conv(batch, stem_conv_);
  x = apply_bn(x, stem_bn_, bn_train);
  x = tensor::prelu(x, stem_act_.slope);
  if (config_.stem.max_pool) x = tensor::max_pool2d(x, {3, 2, 1});

  for (auto& stage : stages_) {
    for (auto& blk : stage) {
      FloatTensor h = apply_conv(x, blk.conv1);
      h = apply_bn(h, blk.bn1, bn_train);
      h = tensor::prelu(h, blk.act1.slope);
      h = apply_conv(h, blk.conv2);
      h = apply_bn(h, blk.bn2, bn_train);
      FloatTensor shortcut = x;
      if (blk.proj) {
        shortcut = apply_conv(x, *blk.proj);
        shortcut = apply_bn(shortcut, *blk.proj_bn, bn_train);
      }
      x = tensor::prelu(tensor::add(h, shortcut), blk.act_out.slope);
    }
  }
  // N x C x F' x T' -> N x C x T'
  return tensor::mean_over_axis(x, 2);
}

FloatTensor EmotionClassifier::pool_and_head(const FloatTensor& frames, bool training) {
  FloatTensor pooled = pooling_ == Pooling::kStatistics ? tensor::mean_std_over_time(frames, kStdEpsilon)
                                                        : tensor::mean_over_time(frames);
  FloatTensor h = tensor::linear(pooled, head_.fc1.weight, head_.fc1.bias);
  h = apply_bn(h, head_.bn, training);
  h = tensor::prelu(h, head_.act.slope);
  return tensor::linear(h, head_.fc2.weight, head_.fc2.bias);
}

FloatTensor EmotionClassifier::forward(const FloatTensor& batch, bool training) {
  if (pooling_ == Pooling::kNoneFixedLength && batch.dim(3) != kFixedLengthFrames) {
    // Cut or pad along time to the fixed length.
    const int n = batch.dim(0), f = batch.dim(2), t = batch.dim(3);
    FloatTensor fixed({n, 1, f, kFixedLengthFrames});
    const int keep = std::min(t, kFixedLengthFrames);
    for (int i = 0; i < n * f; ++i) {
      std::memcpy(fixed.data().data() + std::size_t(i) * kFixedLengthFrames,
                  batch.data().data() + std::size_t(i) * t, sizeof(float) * keep);
    }
    return pool_and_head(backbone_forward(fixed, training), training);
  }
  return pool_and_head(backbone_forward(batch, training), training);
}

std::vector<float> EmotionClassifier::logits(const frontend::MelSpectrogram& spec) {
  const FloatTensor out = forward(make_input_batch({spec}), false);
  return {out.data().begin(), out.data().end()};
}

std::vector<float> EmotionClassifier::embedding(const frontend::MelSpectrogram& spec) {
  FloatTensor input = make_input_batch({spec});
  if (pooling_ == Pooling::kNoneFixedLength) input = make_input_batch({fit_length(spec, kFixedLengthFrames)});
  const FloatTensor frames = backbone_forward(input, false);
  const FloatTensor pooled = pooling_ == Pooling::kStatistics
                                 ? tensor::mean_std_over_time(frames, kStdEpsilon)
                                 : tensor::mean_over_time(frames);
  return {pooled.data().begin(), pooled.data().end()};
}

std::vector<NamedParameter> EmotionClassifier::named_parameters() {
  std::vector<NamedParameter> out;
  auto add_bn = [&](const std::string& prefix, BatchNorm& bn, bool backbone) {
    out.push_back({prefix + ".gamma", bn.gamma, backbone});
    out.push_back({prefix + ".beta", bn.beta, backbone});
  };
  out.push_back({"stem.conv.weight", stem_conv_.weight, true});
  add_bn("stem.bn", stem_bn_, true);
  out.push_back({"stem.prelu.slope", stem_act_.slope, true});
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    for (std::size_t b = 0; b < stages_[s].size(); ++b) {
      auto& blk = stages_[s][b];
      const std::string p = "stage" + std::to_string(s + 1) + ".block" + std::to_string(b);
      out.push_back({p + ".conv1.weight", blk.conv1.weight, true});
      add_bn(p + ".bn1", blk.bn1, true);
      out.push_back({p + ".prelu1.slope", blk.act1.slope, true});
      out.push_back({p + ".conv2.weight", blk.conv2.weight, true});
      add_bn(p + ".bn2", blk.bn2, true);
      if (blk.proj) {
        out.push_back({p + ".proj.weight", blk.proj->weight, true});
        add_bn(p + ".proj_bn", *blk.proj_bn, true);
      }
      out.push_back({p + ".prelu_out.slope", blk.act_out.slope, true});
    }
  }
  out.push_back({"head.fc1.weight", head_.fc1.weight, false});
  out.push_back({"head.fc1.bias", head_.fc1.bias, false});
  add_bn("head.bn", head_.bn, false);
  out.push_back({"head.prelu.slope", head_.act.slope, false});
  out.push_back({"head.fc2.weight", head_.fc2.weight, false});
  out.push_back({"head.fc2.bias", head_.fc2.bias, false});
  return out;
}

std::vector<NamedBuffer> EmotionClassifier::named_buffers() {
  std::vector<NamedBuffer> out;
  auto add_bn = [&](const std::string& prefix, BatchNorm& bn, bool backbone) {
    out.push_back({prefix + ".running_mean", &bn.running_mean, backbone});
    out.push_back({prefix + ".running_var", &bn.running_var, backbone});
  };
  add_bn("stem.bn", stem_bn_, true);
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    for (std::size_t b = 0; b < stages_[s].size(); ++b) {
      auto& blk = stages_[s][b];
      const std::string p = "stage" + std::to_string(s + 1) + ".block" + std::to_string(b);
      add_bn(p + ".bn1", blk.bn1, true);
      add_bn(p + ".bn2", blk.bn2, true);
      if (blk.proj_bn) add_bn(p + ".proj_bn", *blk.proj_bn, true);
    }
  }
  add_bn("head.bn", head_.bn, false);
  return out;
}

std::vector<FloatTensor> EmotionClassifier::parameters() {
  std::vector<FloatTensor> out;
  for (auto& p : named_parameters()) out.push_back(p.tensor);
  return out;
}

std::vector<FloatTensor> EmotionClassifier::head_parameters() {
  std::vector<FloatTensor> out;
  for (auto& p : named_parameters()) {
    if (!p.backbone) out.push_back(p.tensor);
  }
  return out;
}

std::uint64_t EmotionClassifier::backbone_checksum() {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto& p : named_parameters()) {
    if (p.backbone) hash_bytes(h, p.tensor.data().data(), p.tensor.numel() * sizeof(float));
  }
  for (auto& b : named_buffers()) {
    if (b.backbone) hash_bytes(h, b.values->data(), b.values->size() * sizeof(float));
  }
  return h;
}

std::uint64_t EmotionClassifier::head_checksum() {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto& p : named_parameters()) {
    if (!p.backbone) hash_bytes(h, p.tensor.data().data(), p.tensor.numel() * sizeof(float));
  }
  return h;
}

FloatTensor make_input_batch(const std::vector<frontend::MelSpectrogram>& chunks) {
  if (chunks.empty()) throw DataError("make_input_batch: no chunks");
  const int t = chunks[0].frames, f = chunks[0].channels;
  const int n = static_cast<int>(chunks.size());
  FloatTensor batch({n, 1, f, t});
  float* dst = batch.data().data();
  for (int i = 0; i < n; ++i) {
    const auto& c = chunks[i];
    if (c.frames != t || c.channels != f) throw DataError("make_input_batch: chunk shapes differ");
    float* img = dst + std::size_t(i) * f * t;
    for (int tt = 0; tt < t; ++tt) {
      for (int ff = 0; ff < f; ++ff) img[std::size_t(ff) * t + tt] = c.at(tt, ff);
    }
  }
  return batch;
}

frontend::MelSpectrogram fit_length(const frontend::MelSpectrogram& spec, int frames) {
  frontend::MelSpectrogram out(frames, spec.channels);
  out.normalized = spec.normalized;
  const int keep = std::min(frames, spec.frames);
  std::copy_n(spec.data.begin(), std::size_t(keep) * spec.channels, out.data.begin());
  return out;
}

}  // namespace emoser::model
