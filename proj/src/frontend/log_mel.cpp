// src/frontend/log_mel.cpp

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

#include "emoser/frontend/log_mel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "emoser/common/errors.hpp"
#include "emoser/frontend/fft.hpp"

namespace emoser::frontend {

int FrontendConfig::window_samples(int sample_rate) const {
  return static_cast<int>(std::lround(window_ms * sample_rate / 1000.0));
}

int FrontendConfig::hop_samples(int sample_rate) const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

double FrontendConfig::resolved_f_max(int sample_rate) const {
  return f_max > 0.0 ? f_max : sample_rate / 2.0;
}

void FrontendConfig::validate(int sample_rate) const {
  if (sample_rate <= 0) throw ConfigError("frontend: sample rate must be positive");
  if (window_samples(sample_rate) < 1 || hop_samples(sample_rate) < 1) {
    throw ConfigError("frontend: window and hop must span at least one sample");
  }
  if (n_mels < 1) throw ConfigError("frontend: n_mels must be >= 1");
  if (!is_power_of_two(static_cast<std::size_t>(std::max(fft_size, 0))) ||
      fft_size < window_samples(sample_rate)) {
    throw ConfigError("frontend: fft_size must be a power of two >= window length (" +
                      std::to_string(window_samples(sample_rate)) + ")");
  }
  const double fmax = resolved_f_max(sample_rate);
  if (!(f_min >= 0.0 && f_min < fmax && fmax <= sample_rate / 2.0)) {
    throw ConfigError("frontend: need 0 <= f_min < f_max <= sample_rate/2");
  }
  if (!(log_floor > 0.0)) throw ConfigError("frontend: log_floor must be positive");
  if (!(norm_epsilon > 0.0)) throw ConfigError("frontend: norm_epsilon must be positive");
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(const FrontendConfig& config, int sample_rate) {
  config.validate(sample_rate);
  num_bins_ = config.fft_size / 2 + 1;
  const int n = config.n_mels;
  const double mel_lo = hz_to_mel(config.f_min);
  const double mel_hi = hz_to_mel(config.resolved_f_max(sample_rate));
  const double step = (mel_hi - mel_lo) / (n + 1);

  std::vector<double> bin_mel(num_bins_);
  for (int k = 0; k < num_bins_; ++k) {
    bin_mel[k] = hz_to_mel(static_cast<double>(k) * sample_rate / config.fft_size);
  }

  rows_.resize(n);
  centers_hz_.resize(n);
  for (int m = 0; m < n; ++m) {
    const double left = mel_lo + step * m;
    const double center = left + step;
    const double right = center + step;
    centers_hz_[m] = mel_to_hz(center);
    Row& row = rows_[m];
    int first = -1;
    for (int k = 0; k < num_bins_; ++k) {
      const double x = bin_mel[k];
      const double w = std::max(0.0, std::min((x - left) / (center - left),
                                              (right - x) / (right - center)));
      if (w > 0.0) {
        if (first < 0) first = k;
        row.weights.resize(k - first + 1, 0.0);
        row.weights[k - first] = w;
      }
    }
    row.first_bin = std::max(first, 0);
  }
}

double MelFilterbank::weight(int filter, int bin) const {
  const Row& row = rows_[filter];
  const int off = bin - row.first_bin;
  if (off < 0 || off >= static_cast<int>(row.weights.size())) return 0.0;
  return row.weights[off];
}

void MelFilterbank::apply(std::span<const double> power, std::span<double> out) const {
  for (std::size_t m = 0; m < rows_.size(); ++m) {
    const Row& row = rows_[m];
    double acc = 0.0;
    for (std::size_t i = 0; i < row.weights.size(); ++i) {
      acc += row.weights[i] * power[row.first_bin + i];
    }
    out[m] = acc;
  }
}

int frame_count(std::size_t n_samples, const FrontendConfig& config, int sample_rate) {
  const auto win = static_cast<std::size_t>(config.window_samples(sample_rate));
  const auto hop = static_cast<std::size_t>(config.hop_samples(sample_rate));
  if (n_samples < win) {
    throw DataError("segment too short: " + std::to_string(n_samples) + " samples < window of " +
                    std::to_string(win));
  }
  return static_cast<int>((n_samples - win) / hop) + 1;
}

namespace {

std::vector<double> hamming(int n) {
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  for (int i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  }
  return w;
}

}  // namespace

MelSpectrogram log_mel(const AudioSegment& audio, const FrontendConfig& config) {
  audio.validate();
  config.validate(audio.sample_rate);
  const int sr = audio.sample_rate;
  const int frames = frame_count(audio.samples.size(), config, sr);
  const int win = config.window_samples(sr);
  const int hop = config.hop_samples(sr);
  const MelFilterbank bank(config, sr);
  const FftPlan plan(static_cast<std::size_t>(config.fft_size));
  const std::vector<double> window = hamming(win);
  const double floor = config.log_floor;

  MelSpectrogram spec(frames, config.n_mels);

#pragma omp parallel
  {
    std::vector<double> frame(win);
    std::vector<std::complex<double>> scratch;
    std::vector<double> power(bank.num_bins());
    std::vector<double> energies(config.n_mels);
#pragma omp for schedule(static)
    for (int t = 0; t < frames; ++t) {
      const float* src = audio.samples.data() + static_cast<std::size_t>(t) * hop;
      for (int i = 0; i < win; ++i) frame[i] = static_cast<double>(src[i]) * window[i];
      plan.power_spectrum(frame, scratch, power);
      bank.apply(power, energies);
      for (int m = 0; m < config.n_mels; ++m) {
        spec.at(t, m) = static_cast<float>(std::log(std::max(energies[m], floor)));
      }
    }
  }
  return spec;
}

MelSpectrogram log_mel_reference(const AudioSegment& audio, const FrontendConfig& config) {
  audio.validate();
  config.validate(audio.sample_rate);
  const int sr = audio.sample_rate;
  const int frames = frame_count(audio.samples.size(), config, sr);
  const int win = config.window_samples(sr);
  const int hop = config.hop_samples(sr);
  const int n = config.fft_size;
  const MelFilterbank bank(config, sr);

  MelSpectrogram spec(frames, config.n_mels);
  std::vector<double> power(n / 2 + 1);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k <= n / 2; ++k) {
      double re = 0.0, im = 0.0;
      for (int i = 0; i < win; ++i) {
        const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (win - 1));
        const double x = audio.samples[static_cast<std::size_t>(t) * hop + i] * w;
        const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * i / n;
        re += x * std::cos(phase);
        im += x * std::sin(phase);
      }
      power[k] = re * re + im * im;
    }
    for (int m = 0; m < config.n_mels; ++m) {
      double e = 0.0;
      for (int k = 0; k <= n / 2; ++k) e += bank.weight(m, k) * power[k];
      spec.at(t, m) = static_cast<float>(std::log(std::max(e, config.log_floor)));
    }
  }
  return spec;
}

MelSpectrogram normalize_segment(const MelSpectrogram& spec, double norm_epsilon) {
  if (spec.normalized) throw DataError("normalize_segment: spectrogram is already normalized");
  if (spec.frames < 1) throw DataError("normalize_segment: empty spectrogram");
  MelSpectrogram out(spec.frames, spec.channels);
  const double inv_t = 1.0 / spec.frames;
  for (int c = 0; c < spec.channels; ++c) {
    double mean = 0.0;
    for (int t = 0; t < spec.frames; ++t) mean += spec.at(t, c);
    mean *= inv_t;
    double var = 0.0;
    for (int t = 0; t < spec.frames; ++t) {
      const double d = spec.at(t, c) - mean;
      var += d * d;
    }
    const double denom = std::max(std::sqrt(var * inv_t), norm_epsilon);
    for (int t = 0; t < spec.frames; ++t) {
      out.at(t, c) = static_cast<float>((spec.at(t, c) - mean) / denom);
    }
  }
  out.normalized = true;
  return out;
}

}  // namespace emoser::frontend
