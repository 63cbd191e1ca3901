// include/emoser/experiment/synth.hpp

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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emoser/common/rng.hpp"
#include "emoser/experiment/manifest.hpp"
#include "emoser/frontend/wav.hpp"

namespace emoser::experiment {

// Acoustic signature of one synthetic emotion class.
struct ClassProfile {
  std::string name;
  double f0_hz = 150.0;
  double f0_mod_rate_hz = 1.0;
  double f0_mod_depth = 0.05;  // relative
  double f0_slope = 0.0;       // relative change across the segment
  double syllable_rate_hz = 3.0;
  double envelope_sharpness = 1.0;  // exponent on each sin-shaped syllable bump
  double tilt_db_per_octave = -9.0;
  double breathiness = 0.05;

  bool operator==(const ClassProfile&) const = default;
};

struct SpeakerProfile {
  std::string id;
  std::string session;
  double f0_factor = 1.0;
  double formant_shift = 1.0;
  double rate_factor = 1.0;
  double tilt_offset_db = 0.0;
};

struct SyntheticSpec {
  std::vector<ClassProfile> classes;
  int segments_per_class = 200;
  double min_duration = 1.0;
  double max_duration = 3.5;
  int n_speakers = 10;
  int n_sessions = 5;
  double speaker_f0_spread = 0.12;
  double speaker_formant_spread = 0.15;
  double speaker_rate_spread = 0.15;
  double speaker_tilt_spread_db = 2.0;
  double noise_floor_db = -45.0;
  int sample_rate = 16000;
  std::uint64_t seed = 1;

  // The four exp1 classes with well separated profiles.
  static SyntheticSpec emotion_default();
  // Profile for a named class: angry, happy, excited, neutral, sad; other
  // names cycle through the base profiles by position.
  static ClassProfile class_profile(const std::string& name, std::size_t position);
  // 20 speakers with wider speaker spreads; every speaker talks in every
  // class, so utterances differ by speaker more than by label.
  static SyntheticSpec speaker_pretraining();

  void validate() const;
  // Speakers spread evenly over the sessions; deterministic in seed.
  std::vector<SpeakerProfile> speakers() const;
};

frontend::AudioSegment synthesize_segment(const ClassProfile& cls, const SpeakerProfile& speaker,
                                          double duration_s, int sample_rate, double noise_floor_db,
                                          Rng& rng);

struct SyntheticSegment {
  SegmentRecord record;
  frontend::AudioSegment audio;
};

// Segment j of class c is spoken by speaker (j + c) mod n_speakers.
std::vector<SyntheticSegment> synthesize_dataset(const SyntheticSpec& spec);

// Writes <out>/wav/<id>.wav (16 kHz mono PCM-16) and <out>/manifest.csv.
std::vector<SegmentRecord> generate_synthetic_dataset(const SyntheticSpec& spec,
                                                      const std::filesystem::path& out_dir);

}  // namespace emoser::experiment
