// include/emoser/frontend/log_mel.hpp

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

#include <cstddef>
#include <span>
#include <vector>

#include "emoser/frontend/wav.hpp"

namespace emoser::frontend {

struct FrontendConfig {
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int n_mels = 128;
  int fft_size = 1024;
  double f_min = 20.0;
  double f_max = 0.0;  // <= 0 means sample_rate / 2
  double log_floor = 1e-10;
  double norm_epsilon = 1e-5;

  int window_samples(int sample_rate) const;
  int hop_samples(int sample_rate) const;
  double resolved_f_max(int sample_rate) const;

  // Throws ConfigError when the configuration is unusable at `sample_rate`.
  void validate(int sample_rate) const;
};

// T x n_mels matrix of log-mel energies, time-major.
struct MelSpectrogram {
  int frames = 0;
  int channels = 0;
  std::vector<float> data;
  bool normalized = false;

  MelSpectrogram() = default;
  MelSpectrogram(int t, int nu) : frames(t), channels(nu), data(std::size_t(t) * nu, 0.0f) {}

  float& at(int t, int c) { return data[std::size_t(t) * channels + c]; }
  float at(int t, int c) const { return data[std::size_t(t) * channels + c]; }
  std::span<const float> frame(int t) const {
    return {data.data() + std::size_t(t) * channels, std::size_t(channels)};
  }
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters equally spaced on the HTK mel scale, unit peak height,
// stored sparsely as (first bin, weights) per filter.
class MelFilterbank {
 public:
  MelFilterbank(const FrontendConfig& config, int sample_rate);

  int num_filters() const { return static_cast<int>(rows_.size()); }
  int num_bins() const { return num_bins_; }
  double center_hz(int filter) const { return centers_hz_[filter]; }

  // Dense weight of `bin` in `filter`.
  double weight(int filter, int bin) const;

  // out[m] = sum_k weight(m, k) * power[k]
  void apply(std::span<const double> power, std::span<double> out) const;

 private:
  struct Row {
    int first_bin = 0;
    std::vector<double> weights;
  };
  int num_bins_ = 0;
  std::vector<Row> rows_;
  std::vector<double> centers_hz_;
};

// floor((n_samples - win) / hop) + 1. Throws DataError("segment too short")
// when fewer than one window of samples is available.
int frame_count(std::size_t n_samples, const FrontendConfig& config, int sample_rate);

// Hamming window -> |FFT|^2 -> mel filterbank -> ln(max(e, log_floor)).
// Frames are processed in parallel; the result does not depend on the
// thread count.
MelSpectrogram log_mel(const AudioSegment& audio, const FrontendConfig& config);

// Serial, direct-DFT version of log_mel kept as a test oracle.
MelSpectrogram log_mel_reference(const AudioSegment& audio, const FrontendConfig& config);

// Per-channel mean/variance normalization over the segment, population
// std, denominator max(std, eps). Rejects input that is already normalized.
MelSpectrogram normalize_segment(const MelSpectrogram& spec, double norm_epsilon);

}  // namespace emoser::frontend
