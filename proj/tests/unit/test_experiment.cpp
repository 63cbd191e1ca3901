// tests/unit/test_experiment.cpp

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
#include <numeric>
#include <set>

#include "emoser/common/errors.hpp"
#include "emoser/experiment/ablation.hpp"
#include "emoser/experiment/batching.hpp"
#include "emoser/experiment/features.hpp"
#include "emoser/experiment/manifest.hpp"
#include "emoser/experiment/run_config.hpp"
#include "emoser/experiment/splits.hpp"
#include "emoser/experiment/synth.hpp"
#include "emoser/experiment/trainer.hpp"
#include "../support/tempdir.hpp"

using namespace emoser;
using namespace emoser::experiment;
using emoser::testing::TempDir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<SegmentRecord> fake_records(int sessions, int speakers_per_session, int per_speaker) {
  std::vector<SegmentRecord> out;
  const char* labels[] = {"angry", "happy", "neutral", "sad"};
  int n = 0;
  for (int s = 0; s < sessions; ++s)
    for (int p = 0; p < speakers_per_session; ++p)
      for (int i = 0; i < per_speaker; ++i, ++n) {
        SegmentRecord r;
        r.id = "seg" + std::to_string(n);
        r.path = r.id + ".wav";
        r.label = labels[n % 4];
        r.session = "Ses0" + std::to_string(s + 1);
        r.speaker = r.session + "_spk" + std::to_string(p);
        r.duration = 1.0;
        out.push_back(r);
      }
  return out;
}

// A small in-memory synthetic dataset, featurized once per test binary.
const Dataset& tiny_dataset() {
  static const Dataset data = [] {
    SyntheticSpec spec = SyntheticSpec::emotion_default();
    spec.segments_per_class = 10;
    spec.min_duration = 1.0;
    spec.max_duration = 1.6;
    spec.seed = 5;
    auto segments = synthesize_dataset(spec);
    std::vector<SegmentRecord> records;
    std::vector<frontend::AudioSegment> audio;
    for (auto& s : segments) {
      records.push_back(s.record);
      audio.push_back(s.audio);
    }
    auto features = extract_features(audio, frontend::FrontendConfig{});
    return make_dataset(records, std::move(features), ExperimentDef::exp1());
  }();
  return data;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.batch_size = 8;
  c.epochs = 2;
  c.chunk_frames = {100, 150};
  return c;
}

}  // namespace

TEST_SUITE("manifest") {
  TEST_CASE("well-formed file loads; paths resolve against the manifest") {
    TempDir dir;
    write_file(dir / "m.csv",
               "id,path,label,session,speaker,duration\n"
               "a,wav/a.wav,angry,S1,p1,1.5\n"
               "b,/abs/b.wav,sad,S2,p2,2\n"
               "c,c.wav,neutral,S3,p3,0.5\n");
    const auto def = ExperimentDef::exp1();
    const auto recs = load_manifest(dir / "m.csv", &def);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].path == (dir / "wav/a.wav").string());
    CHECK(recs[1].path == "/abs/b.wav");
    CHECK(recs[0].duration == 1.5);
  }

  TEST_CASE("column order is free") {
    TempDir dir;
    write_file(dir / "m.csv", "speaker,id,duration,label,path,session\np,a,1,sad,a.wav,S\n");
    CHECK(load_manifest(dir / "m.csv").front().label == "sad");
  }

  TEST_CASE("distinct errors") {
    TempDir dir;
    const auto def = ExperimentDef::exp1();
    write_file(dir / "cols.csv", "id,path,label\na,a.wav,sad\n");
    CHECK_THROWS_WITH_AS(load_manifest(dir / "cols.csv"), doctest::Contains("missing manifest columns"), DataError);
    write_file(dir / "dup.csv", "id,path,label,session,speaker,duration\nx,a,sad,S,p,1\nx,b,sad,S,p,1\n");
    CHECK_THROWS_WITH_AS(load_manifest(dir / "dup.csv"), doctest::Contains("duplicate segment id 'x'"), DataError);
    write_file(dir / "lab.csv", "id,path,label,session,speaker,duration\nx,a,bored,S,p,1\n");
    CHECK_THROWS_WITH_AS(load_manifest(dir / "lab.csv", &def), doctest::Contains("angry, happy, neutral, sad"),
                         DataError);
    CHECK_THROWS_AS(load_manifest(dir / "none.csv"), IoError);
  }

  TEST_CASE("experiment definitions") {
    CHECK(ExperimentDef::exp1().classes == std::vector<std::string>{"angry", "happy", "neutral", "sad"});
    CHECK(ExperimentDef::exp2().classes == std::vector<std::string>{"angry", "excited", "neutral", "sad"});
    const auto e3 = ExperimentDef::exp3();
    SegmentRecord r;
    r.label = "excited";
    const int merged = e3.class_index(r);
    r.label = "happy";
    CHECK(e3.class_index(r) == merged);
    CHECK(merged >= 0);
    r.label = "excited";
    CHECK(ExperimentDef::exp1().class_index(r) == -1);
    CHECK_THROWS_AS(ExperimentDef::from_name("exp9"), ConfigError);
  }

  TEST_CASE("write and reload") {
    TempDir dir;
    auto recs = fake_records(2, 1, 2);
    for (auto& r : recs) r.path = (dir.path() / r.path).string();
    write_manifest(dir / "m.csv", recs, dir.path());
    const auto back = load_manifest(dir / "m.csv");
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(back[i].id == recs[i].id);
      CHECK(back[i].path == recs[i].path);
    }
  }
}

TEST_SUITE("splits") {
  TEST_CASE("LOSO partitions and separates speakers") {
    const auto recs = fake_records(5, 2, 6);
    const auto folds = loso_splits(recs);
    REQUIRE(folds.size() == 5);
    std::vector<int> tested(recs.size(), 0);
    for (const auto& f : folds) {
      CHECK(f.train.size() + f.test.size() == recs.size());
      std::set<std::string> train_spk, test_spk;
      for (auto i : f.train) train_spk.insert(recs[i].speaker);
      for (auto i : f.test) {
        test_spk.insert(recs[i].speaker);
        tested[i]++;
        CHECK(recs[i].session == f.held_out);
      }
      for (const auto& s : test_spk) CHECK(train_spk.count(s) == 0);
    }
    for (int t : tested) CHECK(t == 1);
  }

  TEST_CASE("LOSO session count") {
    CHECK_THROWS_AS(loso_splits(fake_records(4, 1, 2)), DataError);
    CHECK(loso_splits(fake_records(4, 1, 2), 0).size() == 4);
  }

  TEST_CASE("k-fold stratification") {
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) labels.push_back(i % 4);
    const auto folds = kfold_splits(labels, 5, 3);
    REQUIRE(folds.size() == 5);
    std::vector<int> tested(100, 0);
    for (const auto& f : folds) {
      CHECK(f.test.size() == 20);
      std::vector<int> per(4, 0);
      for (auto i : f.test) {
        per[labels[i]]++;
        tested[i]++;
      }
      for (int c : per) CHECK(c == 5);
    }
    for (int t : tested) CHECK(t == 1);
    const auto again = kfold_splits(labels, 5, 3);
    for (int i = 0; i < 5; ++i) CHECK(again[i].test == folds[i].test);
    CHECK_THROWS_AS(kfold_splits(labels, 1, 3), ConfigError);
    CHECK_THROWS_AS(kfold_splits({0, 0, 0, 1, 1}, 3, 1), DataError);
  }

  TEST_CASE("k-fold per-class counts differ by at most one on uneven data") {
    Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
      const int k = int(rng.uniform_int(2, 6));
      std::vector<int> labels;
      for (int c = 0; c < 4; ++c) {
        const int n = int(rng.uniform_int(k, 40));
        for (int i = 0; i < n; ++i) labels.push_back(c);
      }
      const auto folds = kfold_splits(labels, k, trial);
      for (int c = 0; c < 4; ++c) {
        int lo = 1 << 30, hi = 0;
        for (const auto& f : folds) {
          int n = 0;
          for (auto i : f.test) n += labels[i] == c;
          lo = std::min(lo, n);
          hi = std::max(hi, n);
        }
        REQUIRE(hi - lo <= 1);
      }
    }
  }
}

TEST_SUITE("batching") {
  TEST_CASE("pool sizes") {
    const std::vector<std::size_t> segs{0, 1, 2};
    CHECK(build_training_pool(segs, false, 2).size() == 3);
    const auto pool = build_training_pool(segs, true, 2);
    CHECK(pool.size() == 9);
    CHECK(pool[0].policy == -1);
    CHECK(pool[1].policy == 0);
    CHECK(pool[2].policy == 1);
  }

  TEST_CASE("short segments are zero-padded on the right") {
    frontend::MelSpectrogram s(90, 4);
    for (auto& v : s.data) v = 1.5f;
    s.normalized = true;
    Rng rng(1);
    const auto c = extract_chunk(s, 150, rng);
    REQUIRE(c.frames == 150);
    for (int t = 0; t < 150; ++t)
      for (int ch = 0; ch < 4; ++ch) REQUIRE(c.at(t, ch) == (t < 90 ? 1.5f : 0.0f));
  }

  TEST_CASE("chunks are contiguous windows of the source") {
    frontend::MelSpectrogram s(400, 2);
    for (int t = 0; t < 400; ++t) s.at(t, 0) = s.at(t, 1) = float(t);
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
      const auto c = extract_chunk(s, 150, rng);
      const float start = c.at(0, 0);
      for (int t = 0; t < 150; ++t) REQUIRE(c.at(t, 1) == start + t);
    }
  }

  TEST_CASE("one chunk length per batch, always from the set") {
    const auto& data = tiny_dataset();
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto pool = build_training_pool(idx, true, 2);
    const std::vector<specaug::AugmentationPolicy> policies{specaug::AugmentationPolicy::conservative(),
                                                            specaug::AugmentationPolicy::aggressive()};
    const std::vector<int> set{150, 200, 250, 300};
    Rng rng(4);
    for (std::size_t b = 0; b + 8 <= pool.size(); b += 8) {
      const auto batch = make_batch(std::span(pool).subspan(b, 8), data.features, data.labels, policies, set, rng);
      REQUIRE(std::find(set.begin(), set.end(), batch.chunk_frames) != set.end());
      for (const auto& c : batch.chunks) REQUIRE(c.frames == batch.chunk_frames);
      REQUIRE(batch.labels.size() == 8);
    }
  }
}

TEST_SUITE("synth") {
  TEST_CASE("dataset layout and determinism") {
    SyntheticSpec spec = SyntheticSpec::emotion_default();
    spec.segments_per_class = 5;
    spec.max_duration = 1.2;
    const auto a = synthesize_dataset(spec);
    const auto b = synthesize_dataset(spec);
    REQUIRE(a.size() == 20);
    std::set<std::string> sessions;
    std::map<std::string, std::string> speaker_session;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].audio.samples == b[i].audio.samples);
      sessions.insert(a[i].record.session);
      auto [it, fresh] = speaker_session.emplace(a[i].record.speaker, a[i].record.session);
      CHECK(it->second == a[i].record.session);
    }
    CHECK(sessions.size() == 5);
    spec.seed = 2;
    CHECK(synthesize_dataset(spec)[0].audio.samples != a[0].audio.samples);
  }

  TEST_CASE("class profiles are distinct") {
    const auto spec = SyntheticSpec::emotion_default();
    for (std::size_t i = 0; i < spec.classes.size(); ++i)
      for (std::size_t j = i + 1; j < spec.classes.size(); ++j) CHECK_FALSE(spec.classes[i] == spec.classes[j]);
    SyntheticSpec bad = spec;
    bad.classes[1] = bad.classes[0];
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("written files match the manifest") {
    TempDir dir;
    SyntheticSpec spec = SyntheticSpec::emotion_default();
    spec.segments_per_class = 2;
    spec.max_duration = 1.1;
    const auto recs = generate_synthetic_dataset(spec, dir.path());
    const auto back = load_manifest(dir / "manifest.csv");
    REQUIRE(back.size() == 8);
    const auto audio = frontend::load_wav(back[0].path);
    CHECK(audio.sample_rate == 16000);
    CHECK(std::abs(audio.samples.size() / 16000.0 - back[0].duration) < 1e-3);
  }
}

TEST_SUITE("run_config") {
  TEST_CASE("serialize then parse reproduces the config") {
    RunConfig c;
    set_config_value(c, "train.epochs", "7");
    set_config_value(c, "frontend.hop_ms", "12.5");
    set_config_value(c, "augment.enabled", "true");
    set_config_value(c, "train.chunk_frames", "100, 200");
    set_config_value(c, "synth.kind", "speaker");
    set_config_value(c, "seed", "123");
    const auto text = serialize_run_config(c);
    const auto back = parse_run_config(text);
    CHECK(serialize_run_config(back) == text);
    CHECK(back.train.epochs == 7);
    CHECK(back.frontend.hop_ms == 12.5);
    CHECK(back.train.chunk_frames == std::vector<int>{100, 200});
    CHECK(back.synth.n_speakers == 20);
    CHECK(back.train.seed == 123);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_WITH_AS(parse_run_config("train.epoch=3\n"), doctest::Contains("unknown config key"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config("# comment\ntrain.epochs=x\n"), doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("justtext\n"), ConfigError);
    auto c = parse_run_config("experiment.protocol=holdout\n");
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("EMOSER_SEED overrides the seed") {
    RunConfig c;
    setenv("EMOSER_SEED", "99", 1);
    apply_env_overrides(c);
    unsetenv("EMOSER_SEED");
    CHECK(c.seed == 99);
    CHECK(c.train.seed == 99);
  }
}

TEST_SUITE("trainer") {
  TEST_CASE("history length and a sensible first-epoch loss") {
    const auto& data = tiny_dataset();
    auto cfg = tiny_config();
    auto m = initial_model(cfg, 4, 0, nullptr);
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto history = fit(m, data, idx, cfg, 1);
    REQUIRE(history.size() == 2);
    CHECK(history[0].loss > 0.5 * std::log(4.0));
    CHECK(history[0].loss < 2.0 * std::log(4.0));
    CHECK(history[0].lr == cfg.schedule.initial);
  }

  TEST_CASE("evaluation is deterministic and rejects empty sets") {
    const auto& data = tiny_dataset();
    auto m = initial_model(tiny_config(), 4, 0, nullptr);
    std::vector<std::size_t> idx{0, 5, 9, 20};
    const auto a = evaluate(m, data, idx);
    const auto b = evaluate(m, data, idx);
    CHECK(a.confusion == b.confusion);
    CHECK(a.predictions.size() == 4);
    CHECK_THROWS_AS(evaluate(m, data, {}), DataError);
  }

  TEST_CASE("transfer-learning path leaves the backbone untouched") {
    const auto& data = tiny_dataset();
    auto base = model::EmotionClassifier::build(model::ResNetConfig::lite(), model::Pooling::kStatistics, 7, 3);
    const auto before = base.backbone_checksum();
    auto cfg = tiny_config();
    cfg.use_transfer_learning = true;
    cfg.epochs = 1;
    const auto folds = loso_splits(data.records);
    const std::vector<Fold> one{folds[0]};
    auto results = train_emotion(cfg, data, one, &base, {});
    REQUIRE(results.size() == 1);
    CHECK(results[0].model.backbone_checksum() == before);
    CHECK(results[0].model.n_classes() == 4);
    CHECK(base.backbone_checksum() == before);
    CHECK_THROWS_AS(train_emotion(cfg, data, one, nullptr, {}), ConfigError);
  }

  TEST_CASE("seeded runs repeat exactly") {
    const auto& data = tiny_dataset();
    auto cfg = tiny_config();
    cfg.epochs = 1;
    cfg.use_augmentation = true;
    const auto folds = loso_splits(data.records);
    const std::vector<Fold> one{folds[1]};
    const auto a = train_emotion(cfg, data, one, nullptr, {});
    const auto b = train_emotion(cfg, data, one, nullptr, {});
    CHECK(a[0].history[0].loss == b[0].history[0].loss);
    CHECK(a[0].eval.confusion == b[0].eval.confusion);
  }

  TEST_CASE("speaker pretraining needs two speakers") {
    Dataset one = tiny_dataset();
    one.class_names = {"spk00"};
    CHECK_THROWS_AS(pretrain_speaker(one, tiny_config()), DataError);
  }

  TEST_CASE("config validation") {
    TrainConfig c;
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.chunk_frames.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.policies = {"strange"};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("predictions CSV layout") {
    std::vector<Prediction> p{{"x", 1, 0, {0.5f, -1.0f}}};
    CHECK(predictions_csv(p, {"a", "b"}) == "id,true,pred,logit_a,logit_b\nx,b,a,0.5,-1\n");
  }
}

TEST_SUITE("ablation") {
  TEST_CASE("cell labels and table shape") {
    AblationReport r;
    for (int code = 0; code < 8; ++code) {
      AblationCell c;
      c.transfer_learning = code & 4;
      c.augmentation = code & 2;
      c.statistics_pooling = code & 1;
      r.cells.push_back(c);
    }
    CHECK(r.cell(true, true, true).label() == "TL+Aug+SP");
    CHECK(r.cell(false, false, false).label() == "none");
    CHECK(r.cell(false, true, false).label() == "Aug");
    const auto table = ablation_table(r);
    CHECK(std::count(table.begin(), table.end(), '\n') == 9);
    CHECK(ablation_json(r)["cells"].size() == 8);
  }

  TEST_CASE("both no-SP substitutes are reported on request") {
    const auto& data = tiny_dataset();
    auto config = tiny_config();
    config.epochs = 1;
    const auto folds = kfold_splits(data.labels, 2, 3);
    const auto pretrained = model::EmotionClassifier::build(model::ResNetConfig::lite(), model::Pooling::kStatistics, 6, 1);
    const auto r = run_ablation(config, data, folds, pretrained, model::Pooling::kMeanOnly, {}, true);
    REQUIRE(r.cells.size() == 8);
    REQUIRE(r.alternate_cells.size() == 4);
    for (const auto& c : r.alternate_cells) {
      CHECK(c.pooling == model::Pooling::kNoneFixedLength);
      CHECK_FALSE(c.statistics_pooling);
      CHECK(c.folds.size() == 2);
    }
    CHECK(r.cell(true, false, false).pooling == model::Pooling::kMeanOnly);
    CHECK(ablation_json(r)["alternate_cells"].size() == 4);
    const auto table = ablation_table(r);
    CHECK(std::count(table.begin(), table.end(), '\n') == 13);
    CHECK_THROWS_AS(run_ablation(config, data, folds, pretrained, model::Pooling::kStatistics), ConfigError);
  }
}
