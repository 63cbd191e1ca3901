// src/experiment/synth.cpp

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

#include "emoser/experiment/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "emoser/common/errors.hpp"

namespace emoser::experiment {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxHarmonicHz = 7000.0;
constexpr int kAmplitudeBlock = 16;

std::vector<ClassProfile> base_profiles() {
  return {
      {"angry", 210.0, 3.0, 0.10, -0.10, 5.0, 0.5, -4.0, 0.05},
      {"happy", 260.0, 5.0, 0.20, 0.25, 4.0, 1.0, -7.0, 0.10},
      {"neutral", 150.0, 1.0, 0.04, -0.05, 3.2, 1.5, -10.0, 0.05},
      {"sad", 115.0, 0.6, 0.06, -0.20, 2.0, 3.0, -14.0, 0.25},
  };
}

double formant_gain(double f, double shift) {
  static constexpr double kCenters[3] = {500.0, 1500.0, 2500.0};
  static constexpr double kWidths[3] = {150.0, 200.0, 250.0};
  static constexpr double kGains[3] = {1.0, 0.7, 0.4};
  double g = 0.3;
  for (int i = 0; i < 3; ++i) {
    const double z = (f - kCenters[i] * shift) / kWidths[i];
    g += kGains[i] * std::exp(-0.5 * z * z);
  }
  return g;
}

std::vector<double> syllable_envelope(std::size_t n, int sr, double rate, double sharpness, Rng& rng) {
  std::vector<double> env(n, 0.0);
  constexpr double kDuty = 0.6;
  double t = 0.05 + 0.15 * rng.uniform();
  const double dur = static_cast<double>(n) / sr;
  while (t < dur) {
    const double len = kDuty / rate * (0.7 + 0.6 * rng.uniform());
    const auto start = static_cast<std::size_t>(t * sr);
    const auto stop = std::min(n, static_cast<std::size_t>((t + len) * sr));
    for (std::size_t i = start; i < stop; ++i) {
      const double u = (static_cast<double>(i) / sr - t) / len;
      env[i] = std::pow(std::max(0.0, std::sin(std::numbers::pi * u)), sharpness);
    }
    t += len + (1.0 - kDuty) / rate * (0.5 + rng.uniform());
  }
  return env;
}

}  // namespace

SyntheticSpec SyntheticSpec::emotion_default() {
  SyntheticSpec s;
  s.classes = base_profiles();
  return s;
}

ClassProfile SyntheticSpec::class_profile(const std::string& name, std::size_t position) {
  auto profiles = base_profiles();
  for (auto& p : profiles) {
    if (p.name == name) return p;
  }
  if (name == "excited" || name == "happy+excited") {
    ClassProfile p = profiles[1];
    p.name = name;
    return p;
  }
  ClassProfile p = profiles[position % profiles.size()];
  p.name = name;
  // Classes beyond the base set get shifted f0 so tuples stay distinct.
  p.f0_hz *= 1.0 + 0.15 * static_cast<double>(position / profiles.size());
  return p;
}

SyntheticSpec SyntheticSpec::speaker_pretraining() {
  SyntheticSpec s = emotion_default();
  s.n_speakers = 20;
  s.segments_per_class = 100;
  s.speaker_f0_spread = 0.25;
  s.speaker_formant_spread = 0.25;
  s.speaker_rate_spread = 0.3;
  s.speaker_tilt_spread_db = 4.0;
  s.seed = 1001;
  return s;
}

void SyntheticSpec::validate() const {
  if (classes.size() < 2) throw ConfigError("synthetic spec needs at least 2 classes");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      ClassProfile a = classes[i], b = classes[j];
      a.name = b.name = "";
      if (a == b || classes[i].name == classes[j].name) {
        throw ConfigError("synthetic classes '" + classes[i].name + "' and '" + classes[j].name +
                          "' are not distinct");
      }
    }
  }
  if (segments_per_class < 1 || n_speakers < 1 || n_sessions < 1) {
    throw ConfigError("synthetic spec: counts must be positive");
  }
  if (n_speakers < n_sessions) throw ConfigError("synthetic spec: need at least one speaker per session");
  if (!(min_duration > 0.03 && max_duration >= min_duration)) {
    throw ConfigError("synthetic spec: bad duration range");
  }
  if (sample_rate < 8000) throw ConfigError("synthetic spec: sample rate must be >= 8000");
}

std::vector<SpeakerProfile> SyntheticSpec::speakers() const {
  Rng rng(derive_seed(seed, "synth.speakers"));
  std::vector<SpeakerProfile> out;
  for (int s = 0; s < n_speakers; ++s) {
    SpeakerProfile p;
    char id[32];
    std::snprintf(id, sizeof(id), "spk%02d", s);
    p.id = id;
    char ses[32];
    std::snprintf(ses, sizeof(ses), "Ses%02d", s % n_sessions + 1);
    p.session = ses;
    p.f0_factor = 1.0 + speaker_f0_spread * (2.0 * rng.uniform() - 1.0);
    p.formant_shift = 1.0 + speaker_formant_spread * (2.0 * rng.uniform() - 1.0);
    p.rate_factor = 1.0 + speaker_rate_spread * (2.0 * rng.uniform() - 1.0);
    p.tilt_offset_db = speaker_tilt_spread_db * (2.0 * rng.uniform() - 1.0);
    out.push_back(p);
  }
  return out;
}

frontend::AudioSegment synthesize_segment(const ClassProfile& cls, const SpeakerProfile& speaker,
                                          double duration_s, int sr, double noise_floor_db, Rng& rng) {
  const auto n = static_cast<std::size_t>(duration_s * sr);
  const std::vector<double> env =
      syllable_envelope(n, sr, cls.syllable_rate_hz * speaker.rate_factor, cls.envelope_sharpness, rng);
  const double f0_base = cls.f0_hz * speaker.f0_factor * (1.0 + 0.03 * rng.normal());
  const double mod_phase = kTwoPi * rng.uniform();
  const double tilt = cls.tilt_db_per_octave + speaker.tilt_offset_db;
  const double noise_amp = std::pow(10.0, noise_floor_db / 20.0);

  const int max_harmonics = static_cast<int>(kMaxHarmonicHz / (0.5 * f0_base)) + 1;
  std::vector<double> amps(max_harmonics + 1, 0.0);
  std::vector<double> signal(n);
  double phase = 0.0;
  int n_harm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    const double f0 = f0_base * (1.0 + cls.f0_mod_depth * std::sin(kTwoPi * cls.f0_mod_rate_hz * t + mod_phase) +
                                 cls.f0_slope * (t / duration_s - 0.5));
    if (i % kAmplitudeBlock == 0) {
      n_harm = std::min(max_harmonics, static_cast<int>(kMaxHarmonicHz / f0));
      for (int k = 1; k <= n_harm; ++k) {
        amps[k] = std::pow(10.0, tilt * std::log2(static_cast<double>(k)) / 20.0) *
                  formant_gain(k * f0, speaker.formant_shift);
      }
    }
    phase = std::fmod(phase + kTwoPi * f0 / sr, kTwoPi);
    // sin(k*phase) by the Chebyshev recurrence.
    const double c2 = 2.0 * std::cos(phase);
    double s_prev = 0.0, s_cur = std::sin(phase), voiced = 0.0;
    for (int k = 1; k <= n_harm; ++k) {
      voiced += amps[k] * s_cur;
      const double s_next = c2 * s_cur - s_prev;
      s_prev = s_cur;
      s_cur = s_next;
    }
    const double aspiration = cls.breathiness * rng.normal();
    signal[i] = env[i] * (voiced + aspiration);
  }

  double peak = 0.0;
  for (double v : signal) peak = std::max(peak, std::abs(v));
  const double gain = peak > 0.0 ? 0.5 / peak : 1.0;
  frontend::AudioSegment audio;
  audio.sample_rate = sr;
  audio.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = signal[i] * gain + noise_amp * rng.normal();
    audio.samples[i] = static_cast<float>(std::clamp(v, -1.0, 32767.0 / 32768.0));
  }
  return audio;
}

std::vector<SyntheticSegment> synthesize_dataset(const SyntheticSpec& spec) {
  spec.validate();
  const auto speakers = spec.speakers();
  const int n_classes = static_cast<int>(spec.classes.size());
  std::vector<SyntheticSegment> out(std::size_t(n_classes) * spec.segments_per_class);

#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < static_cast<int>(out.size()); ++idx) {
    const int c = idx / spec.segments_per_class;
    const int j = idx % spec.segments_per_class;
    const auto& cls = spec.classes[c];
    const auto& spk = speakers[(j + c) % spec.n_speakers];
    Rng rng(derive_seed(spec.seed, "synth.segment", static_cast<std::uint64_t>(idx)));
    const double dur = spec.min_duration + (spec.max_duration - spec.min_duration) * rng.uniform();
    SyntheticSegment seg;
    seg.audio = synthesize_segment(cls, spk, dur, spec.sample_rate, spec.noise_floor_db, rng);
    char id[96];
    std::snprintf(id, sizeof(id), "%s_%s_%04d", spk.id.c_str(), cls.name.c_str(), j);
    seg.audio.id = id;
    seg.record = {id, std::string("wav/") + id + ".wav", cls.name, spk.session, spk.id,
                  static_cast<double>(seg.audio.samples.size()) / spec.sample_rate};
    out[idx] = std::move(seg);
  }
  return out;
}

std::vector<SegmentRecord> generate_synthetic_dataset(const SyntheticSpec& spec,
                                                      const std::filesystem::path& out_dir) {
  auto segments = synthesize_dataset(spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "wav", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "wav").string() + ": " + ec.message());
  std::vector<SegmentRecord> records;
  records.reserve(segments.size());
  for (auto& s : segments) {
    const auto path = out_dir / s.record.path;
    frontend::save_wav(path, s.audio);
    s.record.path = path.string();
    records.push_back(s.record);
  }
  write_manifest(out_dir / "manifest.csv", records, out_dir);
  return records;
}

}  // namespace emoser::experiment
