// src/experiment/manifest.cpp

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

#include "emoser/experiment/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "emoser/common/errors.hpp"

namespace emoser::experiment {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

ExperimentDef ExperimentDef::exp1() { return {"exp1", {"angry", "happy", "neutral", "sad"}, {}, LabelField::kEmotion}; }

ExperimentDef ExperimentDef::exp2() {
  return {"exp2", {"angry", "excited", "neutral", "sad"}, {}, LabelField::kEmotion};
}

ExperimentDef ExperimentDef::exp3() {
  return {"exp3",
          {"angry", "happy+excited", "neutral", "sad"},
          {{"happy", "happy+excited"}, {"excited", "happy+excited"}},
          LabelField::kEmotion};
}

ExperimentDef ExperimentDef::custom(std::vector<std::string> classes) {
  if (classes.size() < 2) throw ConfigError("custom experiment needs at least 2 classes");
  return {"custom", std::move(classes), {}, LabelField::kEmotion};
}

ExperimentDef ExperimentDef::from_name(std::string_view name) {
  if (name == "exp1") return exp1();
  if (name == "exp2") return exp2();
  if (name == "exp3") return exp3();
  throw ConfigError("unknown experiment '" + std::string(name) + "' (expected exp1|exp2|exp3|custom)");
}

ExperimentDef ExperimentDef::speakers(const std::vector<SegmentRecord>& records) {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.speaker);
  return {"speaker", {ids.begin(), ids.end()}, {}, LabelField::kSpeaker};
}

int ExperimentDef::class_index(const SegmentRecord& record) const {
  std::string label = field == LabelField::kSpeaker ? record.speaker : record.label;
  if (auto it = merge.find(label); it != merge.end()) label = it->second;
  const auto it = std::find(classes.begin(), classes.end(), label);
  return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
}

std::string ExperimentDef::allowed_labels() const {
  std::string s;
  for (const auto& c : classes) s += (s.empty() ? "" : ", ") + c;
  for (const auto& [from, to] : merge) s += ", " + from + " (-> " + to + ")";
  return s;
}

std::vector<SegmentRecord> load_manifest(const std::filesystem::path& path, const ExperimentDef* def) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  const std::string where = path.string();
  std::string line;
  if (!std::getline(in, line)) throw DataError(where + ": empty manifest");
  const auto header = split_csv(line);

  static const std::vector<std::string> kColumns = {"id", "path", "label", "session", "speaker", "duration"};
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  std::string missing;
  for (const auto& c : kColumns) {
    if (!col.count(c)) missing += (missing.empty() ? "" : ", ") + c;
  }
  if (!missing.empty()) throw DataError(where + ": missing manifest columns: " + missing);

  const auto base = path.parent_path();
  std::vector<SegmentRecord> records;
  std::set<std::string> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() < header.size()) {
      throw DataError(where + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " columns");
    }
    SegmentRecord r;
    r.id = cells[col["id"]];
    r.path = cells[col["path"]];
    r.label = cells[col["label"]];
    r.session = cells[col["session"]];
    r.speaker = cells[col["speaker"]];
    try {
      r.duration = std::stod(cells[col["duration"]]);
    } catch (const std::exception&) {
      throw DataError(where + ":" + std::to_string(line_no) + ": bad duration '" +
                      cells[col["duration"]] + "'");
    }
    if (r.id.empty()) throw DataError(where + ":" + std::to_string(line_no) + ": empty id");
    if (r.session.empty() || r.speaker.empty()) {
      throw DataError(where + ":" + std::to_string(line_no) + ": session and speaker must be non-empty");
    }
    if (!seen.insert(r.id).second) throw DataError(where + ": duplicate segment id '" + r.id + "'");
    if (def && def->class_index(r) < 0) {
      throw DataError(where + ":" + std::to_string(line_no) + ": unknown label '" +
                      (def->field == LabelField::kSpeaker ? r.speaker : r.label) + "' for " + def->name +
                      "; allowed labels: " + def->allowed_labels());
    }
    if (!r.path.empty() && std::filesystem::path(r.path).is_relative()) r.path = (base / r.path).string();
    records.push_back(std::move(r));
  }
  return records;
}

void write_manifest(const std::filesystem::path& path, const std::vector<SegmentRecord>& records,
                    const std::filesystem::path& relative_to) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << "id,path,label,session,speaker,duration\n";
  for (const auto& r : records) {
    std::string p = r.path;
    if (!relative_to.empty()) p = std::filesystem::path(r.path).lexically_relative(relative_to).string();
    char dur[32];
    std::snprintf(dur, sizeof(dur), "%.4f", r.duration);
    out << r.id << ',' << p << ',' << r.label << ',' << r.session << ',' << r.speaker << ',' << dur << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<int> label_indices(const std::vector<SegmentRecord>& records, const ExperimentDef& def) {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const int k = def.class_index(r);
    if (k < 0) {
      throw DataError("segment '" + r.id + "': label not in " + def.name + "; allowed labels: " +
                      def.allowed_labels());
    }
    out.push_back(k);
  }
  return out;
}

}  // namespace emoser::experiment
