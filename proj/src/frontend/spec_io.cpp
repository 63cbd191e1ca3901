// src/frontend/spec_io.cpp

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

#include "emoser/frontend/spec_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "emoser/common/errors.hpp"

namespace emoser::frontend {

namespace {

constexpr char kBinaryMagic[4] = {'E', 'M', 'S', 'P'};
constexpr std::uint32_t kBinaryVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

}  // namespace

DumpFormat parse_dump_format(std::string_view name) {
  if (name == "text") return DumpFormat::kText;
  if (name == "binary") return DumpFormat::kBinary;
  throw ConfigError("unknown dump format '" + std::string(name) + "' (expected text|binary)");
}

void write_spectrogram(const std::filesystem::path& path, const MelSpectrogram& spec,
                       DumpFormat format) {
  std::string out;
  if (format == DumpFormat::kText) {
    out = "emoser-spec v1 " + std::to_string(spec.frames) + " " + std::to_string(spec.channels) + "\n";
    char buf[32];
    for (int t = 0; t < spec.frames; ++t) {
      for (int c = 0; c < spec.channels; ++c) {
        // Shortest representation that parses back to the same float.
        auto res = std::to_chars(buf, buf + sizeof(buf), spec.at(t, c));
        if (c) out.push_back(' ');
        out.append(buf, res.ptr);
      }
      out.push_back('\n');
    }
  } else {
    out.append(kBinaryMagic, 4);
    put_u32(out, kBinaryVersion);
    put_u32(out, static_cast<std::uint32_t>(spec.frames));
    put_u32(out, static_cast<std::uint32_t>(spec.channels));
    for (float v : spec.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write spectrogram: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

MelSpectrogram read_spectrogram(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open spectrogram: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const std::string where = path.string();

  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kBinaryMagic, 4) == 0) {
    if (bytes.size() < 16) throw DataError(where + ": truncated spectrogram header");
    if (get_u32(bytes.data() + 4) != kBinaryVersion) {
      throw DataError(where + ": unsupported spectrogram version");
    }
    const auto t = get_u32(bytes.data() + 8);
    const auto nu = get_u32(bytes.data() + 12);
    const std::size_t count = std::size_t(t) * nu;
    if (bytes.size() != 16 + 4 * count) throw DataError(where + ": spectrogram size mismatch");
    MelSpectrogram spec(static_cast<int>(t), static_cast<int>(nu));
    for (std::size_t i = 0; i < count; ++i) {
      spec.data[i] = std::bit_cast<float>(get_u32(bytes.data() + 16 + 4 * i));
    }
    return spec;
  }

  std::istringstream in(bytes);
  std::string magic, version;
  long t = -1, nu = -1;
  if (!(in >> magic >> version >> t >> nu) || magic != "emoser-spec" || version != "v1" || t < 0 ||
      nu < 0) {
    throw DataError(where + ": bad spectrogram header");
  }
  MelSpectrogram spec(static_cast<int>(t), static_cast<int>(nu));
  std::string token;
  for (auto& v : spec.data) {
    if (!(in >> token)) throw DataError(where + ": truncated spectrogram body");
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw DataError(where + ": bad value '" + token + "'");
    }
  }
  if (in >> token) throw DataError(where + ": trailing data in spectrogram");
  return spec;
}

}  // namespace emoser::frontend
