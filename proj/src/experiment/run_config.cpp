// src/experiment/run_config.cpp

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

#include "emoser/experiment/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "emoser/common/errors.hpp"

namespace emoser::experiment {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
                    std::string(expected) + ")");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end) bad_value(key, value, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  bad_value(key, value, "true or false");
}

std::vector<std::string> parse_list(std::string_view value) {
  std::vector<std::string> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    const auto item = trim(value.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
std::string num(T v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string join_ints(const std::vector<int>& items) {
  std::vector<std::string> parts;
  for (int v : items) parts.push_back(num(v));
  return join(parts);
}

struct Key {
  const char* name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
};

#define EMOSER_NUM_KEY(NAME, FIELD, TYPE)                                                         \
  Key {                                                                                          \
    NAME, [](const RunConfig& c) { return num(c.FIELD); },                                       \
        [](RunConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_number<TYPE>(k, v); } \
  }
#define EMOSER_BOOL_KEY(NAME, FIELD)                                                          \
  Key {                                                                                      \
    NAME, [](const RunConfig& c) { return std::string(c.FIELD ? "true" : "false"); },        \
        [](RunConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_bool(k, v); } \
  }
#define EMOSER_STR_KEY(NAME, FIELD)                                                                 \
  Key {                                                                                            \
    NAME, [](const RunConfig& c) { return c.FIELD; },                                              \
        [](RunConfig& c, std::string_view, std::string_view v) { c.FIELD = std::string(v); }       \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      EMOSER_NUM_KEY("seed", seed, std::uint64_t),
      EMOSER_NUM_KEY("workers", workers, int),

      EMOSER_NUM_KEY("frontend.window_ms", frontend.window_ms, double),
      EMOSER_NUM_KEY("frontend.hop_ms", frontend.hop_ms, double),
      EMOSER_NUM_KEY("frontend.n_mels", frontend.n_mels, int),
      EMOSER_NUM_KEY("frontend.fft_size", frontend.fft_size, int),
      EMOSER_NUM_KEY("frontend.f_min", frontend.f_min, double),
      EMOSER_NUM_KEY("frontend.f_max", frontend.f_max, double),
      EMOSER_NUM_KEY("frontend.log_floor", frontend.log_floor, double),
      EMOSER_NUM_KEY("frontend.norm_epsilon", frontend.norm_epsilon, double),

      EMOSER_BOOL_KEY("augment.enabled", train.use_augmentation),
      Key{"augment.policies", [](const RunConfig& c) { return join(c.train.policies); },
          [](RunConfig& c, std::string_view, std::string_view v) { c.train.policies = parse_list(v); }},

      EMOSER_STR_KEY("model.preset", train.model_preset),
      Key{"model.pooling", [](const RunConfig& c) { return std::string(model::pooling_name(c.train.pooling)); },
          [](RunConfig& c, std::string_view, std::string_view v) { c.train.pooling = model::parse_pooling(v); }},

      EMOSER_NUM_KEY("train.batch_size", train.batch_size, int),
      Key{"train.chunk_frames", [](const RunConfig& c) { return join_ints(c.train.chunk_frames); },
          [](RunConfig& c, std::string_view k, std::string_view v) {
            c.train.chunk_frames.clear();
            for (const auto& item : parse_list(v)) c.train.chunk_frames.push_back(parse_number<int>(k, item));
          }},
      EMOSER_NUM_KEY("train.epochs", train.epochs, int),
      EMOSER_NUM_KEY("train.lr", train.schedule.initial, double),
      EMOSER_NUM_KEY("train.lr_constant_epochs", train.schedule.constant_epochs, int),
      EMOSER_NUM_KEY("train.lr_halving_period", train.schedule.halving_period, int),
      EMOSER_NUM_KEY("train.momentum", train.momentum, double),
      EMOSER_BOOL_KEY("train.transfer_learning", train.use_transfer_learning),
      EMOSER_BOOL_KEY("train.fine_tune", train.fine_tune),

      EMOSER_STR_KEY("experiment.name", experiment),
      Key{"experiment.classes", [](const RunConfig& c) { return join(c.classes); },
          [](RunConfig& c, std::string_view, std::string_view v) { c.classes = parse_list(v); }},
      EMOSER_NUM_KEY("experiment.sessions", sessions, int),
      EMOSER_STR_KEY("experiment.protocol", protocol),
      EMOSER_NUM_KEY("experiment.folds", folds, int),

      EMOSER_BOOL_KEY("ablation.both_substitutes", ablation_both_substitutes),
      Key{"ablation.no_sp_pooling", [](const RunConfig& c) { return std::string(model::pooling_name(c.no_sp_pooling)); },
          [](RunConfig& c, std::string_view, std::string_view v) { c.no_sp_pooling = model::parse_pooling(v); }},

      EMOSER_STR_KEY("paths.manifest", manifest),
      EMOSER_STR_KEY("paths.run_dir", run_dir),
      EMOSER_STR_KEY("paths.checkpoint", checkpoint),

      Key{"synth.kind", [](const RunConfig& c) { return c.synth_kind; },
          [](RunConfig& c, std::string_view k, std::string_view v) {
            if (v == "emotion") {
              c.synth = SyntheticSpec::emotion_default();
            } else if (v == "speaker") {
              c.synth = SyntheticSpec::speaker_pretraining();
            } else {
              bad_value(k, v, "emotion or speaker");
            }
            c.synth_kind = std::string(v);
          }},
      Key{"synth.classes",
          [](const RunConfig& c) {
            std::vector<std::string> names;
            for (const auto& p : c.synth.classes) names.push_back(p.name);
            return join(names);
          },
          [](RunConfig& c, std::string_view, std::string_view v) {
            c.synth.classes.clear();
            const auto names = parse_list(v);
            for (std::size_t i = 0; i < names.size(); ++i) {
              c.synth.classes.push_back(SyntheticSpec::class_profile(names[i], i));
            }
          }},
      EMOSER_NUM_KEY("synth.segments_per_class", synth.segments_per_class, int),
      EMOSER_NUM_KEY("synth.min_duration", synth.min_duration, double),
      EMOSER_NUM_KEY("synth.max_duration", synth.max_duration, double),
      EMOSER_NUM_KEY("synth.n_speakers", synth.n_speakers, int),
      EMOSER_NUM_KEY("synth.n_sessions", synth.n_sessions, int),
      EMOSER_NUM_KEY("synth.speaker_f0_spread", synth.speaker_f0_spread, double),
      EMOSER_NUM_KEY("synth.speaker_formant_spread", synth.speaker_formant_spread, double),
      EMOSER_NUM_KEY("synth.speaker_rate_spread", synth.speaker_rate_spread, double),
      EMOSER_NUM_KEY("synth.speaker_tilt_spread_db", synth.speaker_tilt_spread_db, double),
      EMOSER_NUM_KEY("synth.noise_floor_db", synth.noise_floor_db, double),
      EMOSER_NUM_KEY("synth.sample_rate", synth.sample_rate, int),
      EMOSER_NUM_KEY("synth.seed", synth.seed, std::uint64_t),
  };
  return table;
}

#undef EMOSER_NUM_KEY
#undef EMOSER_BOOL_KEY
#undef EMOSER_STR_KEY

}  // namespace

ExperimentDef RunConfig::experiment_def() const {
  if (experiment == "custom") return ExperimentDef::custom(classes);
  return ExperimentDef::from_name(experiment);
}

void RunConfig::validate() const {
  train.validate();
  experiment_def();
  if (protocol != "loso" && protocol != "kfold") {
    throw ConfigError("experiment.protocol must be loso or kfold, got '" + protocol + "'");
  }
  if (folds < 2) throw ConfigError("experiment.folds must be >= 2");
  if (sessions < 0) throw ConfigError("experiment.sessions must be >= 0");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (no_sp_pooling == model::Pooling::kStatistics) {
    throw ConfigError("ablation.no_sp_pooling must be mean_only or none_fixed_length");
  }
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  for (const auto& k : keys()) {
    if (key == k.name) {
      k.set(config, key, value);
      if (key == "seed") config.train.seed = config.seed;
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  RunConfig config = std::move(base);
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.train.seed = config.seed;
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), std::move(base));
}

std::string serialize_run_config(const RunConfig& config) {
  std::string out;
  for (const auto& k : keys()) out += std::string(k.name) + "=" + k.get(config) + "\n";
  return out;
}

void apply_env_overrides(RunConfig& config) {
  if (const char* env = std::getenv("EMOSER_SEED"); env != nullptr && *env != '\0') {
    set_config_value(config, "seed", env);
  }
}

}  // namespace emoser::experiment
