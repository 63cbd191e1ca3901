// src/model/checkpoint.cpp

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

#include "emoser/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

namespace emoser::model {

using nlohmann::json;

namespace {

void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

json metadata_to_json(const CheckpointMetadata& m) {
  return {{"task", m.task},   {"class_names", m.class_names}, {"epoch", m.epoch},
          {"seed", m.seed},   {"policies", m.policies},       {"extra", m.extra}};
}

CheckpointMetadata metadata_from_json(const json& j) {
  CheckpointMetadata m;
  m.task = j.value("task", "");
  m.class_names = j.value("class_names", std::vector<std::string>{});
  m.epoch = j.value("epoch", 0);
  m.seed = j.value("seed", std::uint64_t{0});
  m.policies = j.value("policies", std::vector<std::string>{});
  m.extra = j.value("extra", json::object());
  return m;
}

}  // namespace

json config_to_json(const ResNetConfig& c) {
  return {{"preset", c.preset},
          {"blocks", c.blocks},
          {"channels", c.channels},
          {"strides", c.strides},
          {"stem", {{"kernel", c.stem.kernel}, {"stride", c.stem.stride}, {"max_pool", c.stem.max_pool}}},
          {"head_hidden", c.head_hidden},
          {"n_mels", c.n_mels}};
}

ResNetConfig config_from_json(const json& j) {
  ResNetConfig c;
  c.preset = j.at("preset").get<std::string>();
  c.blocks = j.at("blocks").get<std::array<int, 4>>();
  c.channels = j.at("channels").get<std::array<int, 4>>();
  c.strides = j.at("strides").get<std::array<int, 4>>();
  const auto& stem = j.at("stem");
  c.stem = {stem.at("kernel").get<int>(), stem.at("stride").get<int>(), stem.at("max_pool").get<bool>()};
  c.head_hidden = j.at("head_hidden").get<int>();
  c.n_mels = j.at("n_mels").get<int>();
  return c;
}

void save_checkpoint(EmotionClassifier& model, const CheckpointMetadata& metadata,
                     const std::filesystem::path& path) {
  json tensors = json::array();
  std::vector<const float*> sources;
  std::vector<std::size_t> counts;
  std::uint64_t offset = 0;
  for (auto& p : model.named_parameters()) {
    tensors.push_back({{"name", p.name}, {"shape", p.tensor.shape()}, {"offset", offset}});
    sources.push_back(p.tensor.data().data());
    counts.push_back(p.tensor.numel());
    offset += p.tensor.numel();
  }
  for (auto& b : model.named_buffers()) {
    tensors.push_back({{"name", b.name},
                       {"shape", std::vector<int>{static_cast<int>(b.values->size())}},
                       {"offset", offset}});
    sources.push_back(b.values->data());
    counts.push_back(b.values->size());
    offset += b.values->size();
  }
  const json header = {{"config", config_to_json(model.config())},
                       {"pooling", std::string(pooling_name(model.pooling()))},
                       {"n_classes", model.n_classes()},
                       {"metadata", metadata_to_json(metadata)},
                       {"tensors", tensors}};
  const std::string text = header.dump();

  std::string out(kCheckpointMagic, 8);
  put_le(out, kCheckpointVersion, 4);
  put_le(out, text.size(), 8);
  out += text;
  out.reserve(out.size() + offset * 4);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t k = 0; k < counts[i]; ++k) put_le(out, std::bit_cast<std::uint32_t>(sources[i][k]), 4);
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write checkpoint: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, const ResNetConfig* expected) {
  using Kind = CheckpointError::Kind;
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const std::string where = path.string();

  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
    throw CheckpointError(Kind::kBadMagic, where + ": bad magic (not an emoser checkpoint)");
  }
  if (bytes.size() < 20) throw CheckpointError(Kind::kTruncated, where + ": truncated header");
  const auto version = static_cast<std::uint32_t>(get_le(bytes.data() + 8, 4));
  if (version != kCheckpointVersion) {
    throw CheckpointError(Kind::kVersionMismatch, where + ": checkpoint version " + std::to_string(version) +
                                                      " != supported " + std::to_string(kCheckpointVersion));
  }
  const std::uint64_t json_len = get_le(bytes.data() + 12, 8);
  if (bytes.size() - 20 < json_len) throw CheckpointError(Kind::kTruncated, where + ": truncated metadata");

  json header;
  ResNetConfig stored;
  Pooling pooling;
  int n_classes;
  try {
    header = json::parse(bytes.substr(20, json_len));
    stored = config_from_json(header.at("config"));
    pooling = parse_pooling(header.at("pooling").get<std::string>());
    n_classes = header.at("n_classes").get<int>();
  } catch (const json::exception& e) {
    throw CheckpointError(Kind::kMalformed, where + ": malformed metadata: " + e.what());
  }
  const char* blob = bytes.data() + 20 + json_len;
  const std::size_t blob_floats = (bytes.size() - 20 - json_len) / 4;

  LoadedCheckpoint loaded{EmotionClassifier::build(expected ? *expected : stored, pooling, n_classes, 0),
                          metadata_from_json(header.value("metadata", json::object()))};

  std::map<std::string, std::pair<std::vector<int>, std::uint64_t>> entries;
  for (const auto& t : header.at("tensors")) {
    entries[t.at("name").get<std::string>()] = {t.at("shape").get<std::vector<int>>(),
                                                t.at("offset").get<std::uint64_t>()};
  }
  auto fetch = [&](const std::string& name, const std::vector<int>& shape, float* dst) {
    auto it = entries.find(name);
    if (it == entries.end()) {
      throw CheckpointError(Kind::kShapeMismatch, where + ": tensor '" + name +
                                                      "' required by the model config is missing");
    }
    if (it->second.first != shape) {
      throw CheckpointError(Kind::kShapeMismatch,
                            where + ": shape mismatch for '" + name + "': checkpoint " +
                                tensor::shape_str(it->second.first) + " vs model " + tensor::shape_str(shape));
    }
    const std::size_t count = tensor::shape_numel(shape);
    if (it->second.second + count > blob_floats) {
      throw CheckpointError(Kind::kTruncated, where + ": truncated data for '" + name + "'");
    }
    const char* src = blob + 4 * it->second.second;
    for (std::size_t i = 0; i < count; ++i) {
      dst[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(src + 4 * i, 4)));
    }
    entries.erase(it);
  };
  for (auto& p : loaded.model.named_parameters()) fetch(p.name, p.tensor.shape(), p.tensor.data().data());
  for (auto& b : loaded.model.named_buffers()) {
    fetch(b.name, {static_cast<int>(b.values->size())}, b.values->data());
  }
  if (!entries.empty()) {
    throw CheckpointError(Kind::kShapeMismatch,
                          where + ": checkpoint holds tensor '" + entries.begin()->first +
                              "' that the model config does not have");
  }
  return loaded;
}

}  // namespace emoser::model
