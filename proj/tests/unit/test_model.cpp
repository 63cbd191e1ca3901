// tests/unit/test_model.cpp

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

#include <doctest.h>

#include <cmath>
#include <fstream>

#include "emoser/common/errors.hpp"
#include "emoser/common/rng.hpp"
#include "emoser/model/checkpoint.hpp"
#include "emoser/model/resnet.hpp"
#include "emoser/tensor/ops.hpp"
#include "../support/tempdir.hpp"

using namespace emoser;
using namespace emoser::model;
using emoser::testing::TempDir;

namespace {

frontend::MelSpectrogram random_spec(int frames, std::uint64_t seed, int channels = 128) {
  Rng rng(seed);
  frontend::MelSpectrogram s(frames, channels);
  for (auto& v : s.data) v = static_cast<float>(rng.normal());
  s.normalized = true;
  return s;
}

std::vector<std::vector<float>> snapshot(EmotionClassifier& m, bool backbone) {
  std::vector<std::vector<float>> out;
  for (auto& p : m.named_parameters()) {
    if (p.backbone == backbone) out.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
  }
  for (auto& b : m.named_buffers()) {
    if (b.backbone == backbone) out.push_back(*b.values);
  }
  return out;
}

}  // namespace

TEST_CASE("presets and head widths") {
  const auto paper = ResNetConfig::paper();
  CHECK(paper.blocks == std::array<int, 4>{3, 4, 6, 3});
  CHECK(paper.base_channels() == 32);
  auto big = EmotionClassifier::build(paper, Pooling::kStatistics, 4, 1);
  CHECK(big.head_input_width() == 512);

  const auto lite = ResNetConfig::lite();
  CHECK(lite.base_channels() == 8);
  auto small = EmotionClassifier::build(lite, Pooling::kStatistics, 4, 1);
  CHECK(small.head_input_width() == 128);
  auto mean_only = EmotionClassifier::build(lite, Pooling::kMeanOnly, 4, 1);
  CHECK(mean_only.head_input_width() == 64);
  CHECK_THROWS_AS(ResNetConfig::from_preset("huge"), ConfigError);
  CHECK_THROWS_AS(EmotionClassifier::build(lite, Pooling::kStatistics, 1, 1), ConfigError);
}

TEST_CASE("same seed builds identical parameters") {
  auto a = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 4, 9);
  auto b = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 4, 9);
  CHECK(snapshot(a, true) == snapshot(b, true));
  CHECK(snapshot(a, false) == snapshot(b, false));
  auto c = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 4, 10);
  CHECK(snapshot(a, true) != snapshot(c, true));
}

TEST_CASE("variable-length inputs give K finite logits") {
  for (auto pooling : {Pooling::kStatistics, Pooling::kMeanOnly, Pooling::kNoneFixedLength}) {
    auto m = EmotionClassifier::build(ResNetConfig::lite(), pooling, 4, 3);
    const int minimum = m.config().min_input_frames();
    for (int t : {minimum, 150, 298, 300, 1000}) {
      CAPTURE(t);
      const auto logits = m.logits(random_spec(t, t));
      REQUIRE(logits.size() == 4);
      for (float v : logits) REQUIRE(std::isfinite(v));
    }
  }
}

TEST_CASE("too-short input names the minimum") {
  auto m = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 4, 3);
  const int minimum = m.config().min_input_frames();
  CHECK_THROWS_WITH_AS(m.logits(random_spec(minimum - 1, 1)), doctest::Contains(std::to_string(minimum).c_str()), DataError);
}

TEST_CASE("all-zero input gives finite logits; eval forward is repeatable") {
  auto m = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 4, 3);
  frontend::MelSpectrogram zeros(200, 128);
  zeros.normalized = true;
  for (float v : m.logits(zeros)) CHECK(std::isfinite(v));
  const auto spec = random_spec(180, 5);
  const auto first = m.logits(spec);
  for (int i = 0; i < 20; ++i) REQUIRE(m.logits(spec) == first);
}

TEST_CASE("statistics pooling std entries respect the epsilon floor") {
  auto m = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 4, 3);
  const auto emb = m.embedding(random_spec(160, 2));
  REQUIRE(emb.size() == 128);
  for (std::size_t i = 64; i < 128; ++i) CHECK(emb[i] >= std::sqrt(1e-9f) * 0.999f);
}

TEST_CASE("replace_head keeps the backbone and re-initializes the head") {
  auto m = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 20, 1);
  const auto backbone = snapshot(m, true);
  const auto checksum = m.backbone_checksum();
  m.replace_head(4, 77);
  CHECK(m.n_classes() == 4);
  CHECK(m.backbone_checksum() == checksum);
  CHECK(snapshot(m, true) == backbone);
  CHECK(m.logits(random_spec(150, 1)).size() == 4);
  const auto head1 = snapshot(m, false);
  m.replace_head(4, 77);
  CHECK(snapshot(m, false) == head1);
  m.replace_head(20, 5);
  CHECK(m.logits(random_spec(150, 1)).size() == 20);
  m.replace_head(4, 5, Pooling::kMeanOnly);
  CHECK(m.pooling() == Pooling::kMeanOnly);
  CHECK(m.head_input_width() == 64);
}

TEST_CASE("frozen backbone gets no gradients, head does") {
  auto m = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 4, 1);
  m.freeze_backbone();
  CHECK(m.backbone_frozen());
  const std::vector<int> labels{0, 1, 2, 3};
  std::vector<frontend::MelSpectrogram> chunks;
  for (int i = 0; i < 4; ++i) chunks.push_back(random_spec(150, 10 + i));
  auto loss = tensor::softmax_cross_entropy(m.forward(make_input_batch(chunks), true), std::span<const int>(labels));
  loss.backward();
  float head_max = 0.0f;
  for (auto& p : m.named_parameters()) {
    if (p.backbone) {
      CHECK_FALSE(p.tensor.has_grad());
    } else if (p.tensor.has_grad()) {
      for (float g : p.tensor.grad()) head_max = std::max(head_max, std::abs(g));
    }
  }
  CHECK(head_max > 0.0f);
  m.unfreeze_backbone();
  CHECK_FALSE(m.backbone_frozen());
}

TEST_CASE("clone is deep") {
  auto m = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 4, 1);
  auto c = m.clone();
  const auto spec = random_spec(150, 3);
  CHECK(c.logits(spec) == m.logits(spec));
  c.named_parameters()[0].tensor.data()[0] += 1.0f;
  CHECK(c.logits(spec) != m.logits(spec));
}

TEST_CASE("checkpoint round trip is bit-exact") {
  TempDir dir;
  auto m = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 4, 11);
  // Touch the BN buffers so they are not at their initial values.
  std::vector<frontend::MelSpectrogram> chunks{random_spec(150, 1), random_spec(150, 2)};
  m.forward(make_input_batch(chunks), true);
  CheckpointMetadata meta;
  meta.task = "exp1";
  meta.class_names = {"angry", "happy", "neutral", "sad"};
  meta.epoch = 3;
  meta.seed = 42;
  meta.policies = {"conservative"};
  save_checkpoint(m, meta, dir / "m.ckpt");
  auto loaded = load_checkpoint(dir / "m.ckpt");
  const auto spec = random_spec(233, 4);
  CHECK(loaded.model.logits(spec) == m.logits(spec));
  CHECK(loaded.metadata.class_names == meta.class_names);
  CHECK(loaded.metadata.seed == 42);
  CHECK(loaded.metadata.epoch == 3);
  CHECK(loaded.metadata.policies == meta.policies);
  CHECK(snapshot(loaded.model, true) == snapshot(m, true));
}

TEST_CASE("checkpoint failures are distinct") {
  TempDir dir;
  auto m = EmotionClassifier::build(ResNetConfig::lite(), Pooling::kStatistics, 4, 11);
  save_checkpoint(m, {}, dir / "m.ckpt");
  std::string bytes;
  {
    std::ifstream in(dir / "m.ckpt", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream(dir / name, std::ios::binary) << content;
    return dir / name;
  };
  auto kind_of = [](const std::filesystem::path& p, const ResNetConfig* cfg = nullptr) {
    try {
      load_checkpoint(p, cfg);
    } catch (const CheckpointError& e) {
      return e.kind();
    }
    FAIL("expected a checkpoint error");
    return CheckpointError::Kind::kMalformed;
  };

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(kind_of(write("magic", bad_magic)) == CheckpointError::Kind::kBadMagic);

  std::string bad_version = bytes;
  bad_version[8] = 9;
  CHECK(kind_of(write("version", bad_version)) == CheckpointError::Kind::kVersionMismatch);

  CHECK(kind_of(write("short", bytes.substr(0, bytes.size() - 100))) == CheckpointError::Kind::kTruncated);

  const auto paper = ResNetConfig::paper();
  CHECK(kind_of(dir / "m.ckpt", &paper) == CheckpointError::Kind::kShapeMismatch);

  CHECK_THROWS_AS(load_checkpoint(dir / "missing.ckpt"), IoError);
}
