// include/emoser/frontend/spec_io.hpp

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

#include <filesystem>
#include <string_view>

#include "emoser/frontend/log_mel.hpp"

namespace emoser::frontend {

enum class DumpFormat { kText, kBinary };

DumpFormat parse_dump_format(std::string_view name);

// Text form: a header line "emoser-spec v1 T nu" followed by T rows of nu
// floats printed with enough digits to round-trip exactly.
// Binary form: "EMSP", u32 version (1), u32 T, u32 nu, then T*nu
// little-endian f32 values, row-major.
void write_spectrogram(const std::filesystem::path& path, const MelSpectrogram& spec,
                       DumpFormat format);

// Detects the format from the leading bytes. The dump does not record the
// normalization flag; the caller sets it.
MelSpectrogram read_spectrogram(const std::filesystem::path& path);

}  // namespace emoser::frontend
