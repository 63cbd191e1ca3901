// bench/bench_kernels.cpp

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

// OpenMP kernels against their serial references. The thread count is the
// second benchmark argument.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>
#include <vector>

#include "emoser/common/rng.hpp"
#include "emoser/frontend/log_mel.hpp"
#include "emoser/tensor/conv_kernels.hpp"

using namespace emoser;
using tensor::kernels::ConvGeometry;

namespace {

// First-stage 3x3 conv of the lite preset on a batch of 150-frame chunks.
ConvGeometry stage_geometry(int batch) {
  ConvGeometry g;
  g.batch = batch;
  g.in_channels = 8;
  g.out_channels = 8;
  g.in_h = 75;
  g.in_w = 64;
  g.kernel_h = g.kernel_w = 3;
  g.pad_h = g.pad_w = 1;
  return g;
}

std::vector<float> random_buffer(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return v;
}

void BM_ConvForward(benchmark::State& state) {
  const auto g = stage_geometry(static_cast<int>(state.range(0)));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const auto x = random_buffer(g.batch * g.input_size(), 1);
  const auto w = random_buffer(g.weight_size(), 2);
  std::vector<float> y(g.batch * g.output_size());
  for (auto _ : state) {
    tensor::kernels::conv2d_forward(g, x.data(), w.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * g.batch);
}

void BM_ConvForwardReference(benchmark::State& state) {
  const auto g = stage_geometry(static_cast<int>(state.range(0)));
  const auto x = random_buffer(g.batch * g.input_size(), 1);
  const auto w = random_buffer(g.weight_size(), 2);
  std::vector<float> y(g.batch * g.output_size());
  for (auto _ : state) {
    tensor::kernels::reference::conv2d_forward(g, x.data(), w.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * g.batch);
}

void BM_ConvBackward(benchmark::State& state) {
  const auto g = stage_geometry(static_cast<int>(state.range(0)));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const auto x = random_buffer(g.batch * g.input_size(), 1);
  const auto w = random_buffer(g.weight_size(), 2);
  const auto gy = random_buffer(g.batch * g.output_size(), 3);
  std::vector<float> gx(x.size()), gw(w.size());
  for (auto _ : state) {
    tensor::kernels::conv2d_backward(g, x.data(), w.data(), gy.data(), gx.data(), gw.data());
    benchmark::DoNotOptimize(gx.data());
  }
  state.SetItemsProcessed(state.iterations() * g.batch);
}

void BM_ConvBackwardReference(benchmark::State& state) {
  const auto g = stage_geometry(static_cast<int>(state.range(0)));
  const auto x = random_buffer(g.batch * g.input_size(), 1);
  const auto w = random_buffer(g.weight_size(), 2);
  const auto gy = random_buffer(g.batch * g.output_size(), 3);
  std::vector<float> gx(x.size()), gw(w.size());
  for (auto _ : state) {
    tensor::kernels::reference::conv2d_backward(g, x.data(), w.data(), gy.data(), gx.data(), gw.data());
    benchmark::DoNotOptimize(gx.data());
  }
  state.SetItemsProcessed(state.iterations() * g.batch);
}

frontend::AudioSegment chirp_audio(double seconds) {
  frontend::AudioSegment a;
  a.sample_rate = 16000;
  const auto n = static_cast<std::size_t>(seconds * a.sample_rate);
  a.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / a.sample_rate;
    a.samples[i] = static_cast<float>(0.5 * std::sin(2.0 * M_PI * (100.0 + 1000.0 * t) * t));
  }
  return a;
}

void BM_LogMel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const auto audio = chirp_audio(static_cast<double>(state.range(0)));
  const frontend::FrontendConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(frontend::log_mel(audio, config));
}

void BM_LogMelReference(benchmark::State& state) {
  const auto audio = chirp_audio(static_cast<double>(state.range(0)));
  const frontend::FrontendConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(frontend::log_mel_reference(audio, config));
}

// {size, 1 thread} and {size, all threads} when there is more than one.
void thread_sweep(benchmark::internal::Benchmark* b, std::int64_t size) {
  b->Args({size, 1});
  if (omp_get_max_threads() > 1) b->Args({size, omp_get_max_threads()});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_ConvForward)->Apply([](auto* b) { thread_sweep(b, 32); });
BENCHMARK(BM_ConvForwardReference)->Args({32})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackward)->Apply([](auto* b) { thread_sweep(b, 32); });
BENCHMARK(BM_ConvBackwardReference)->Args({32})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogMel)->Apply([](auto* b) { thread_sweep(b, 3); });
BENCHMARK(BM_LogMelReference)->Args({3})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
