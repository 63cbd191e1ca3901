// tests/unit/test_tensor.cpp

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

#include <doctest.h>

#include <cmath>

#include "emoser/common/errors.hpp"
#include "emoser/tensor/conv_kernels.hpp"
#include "emoser/tensor/ops.hpp"
#include "emoser/tensor/optim.hpp"
#include "../support/op_cases.hpp"

using namespace emoser;
using namespace emoser::tensor;
using emoser::testing::DTensor;

TEST_CASE("every op passes finite-difference checks") {
  for (const auto& op : emoser::testing::op_cases()) {
    SUBCASE(op.name.c_str()) {
      Rng rng(derive_seed(17, op.name));
      for (int i = 0; i < 20; ++i) {
        auto inst = op.make(rng);
        const auto res = emoser::testing::grad_check(inst.fn, inst.inputs, rng);
        CAPTURE(i);
        CAPTURE(res.worst);
        REQUIRE(res.max_rel_error < 1e-5);
      }
    }
  }
}

TEST_CASE("parallel conv kernels match the direct loops") {
  Rng rng(4);
  for (int trial = 0; trial < 15; ++trial) {
    kernels::ConvGeometry g;
    g.batch = int(rng.uniform_int(1, 3));
    g.in_channels = int(rng.uniform_int(1, 4));
    g.in_h = int(rng.uniform_int(3, 9));
    g.in_w = int(rng.uniform_int(3, 9));
    g.out_channels = int(rng.uniform_int(1, 4));
    g.kernel_h = int(rng.uniform_int(1, 3));
    g.kernel_w = int(rng.uniform_int(1, 3));
    g.stride_h = int(rng.uniform_int(1, 2));
    g.stride_w = int(rng.uniform_int(1, 2));
    g.pad_h = int(rng.uniform_int(0, 1));
    g.pad_w = int(rng.uniform_int(0, 1));
    std::vector<double> x(g.batch * g.input_size()), w(g.weight_size()), gy(g.batch * g.output_size());
    for (auto* v : {&x, &w, &gy})
      for (auto& e : *v) e = rng.normal();
    std::vector<double> y1(gy.size()), y2(gy.size());
    kernels::conv2d_forward(g, x.data(), w.data(), y1.data());
    kernels::reference::conv2d_forward(g, x.data(), w.data(), y2.data());
    for (std::size_t i = 0; i < y1.size(); ++i) REQUIRE(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));

    std::vector<double> gx1(x.size(), 0.0), gx2(x.size(), 0.0), gw1(w.size(), 0.0), gw2(w.size(), 0.0);
    kernels::conv2d_backward(g, x.data(), w.data(), gy.data(), gx1.data(), gw1.data());
    kernels::reference::conv2d_backward(g, x.data(), w.data(), gy.data(), gx2.data(), gw2.data());
    for (std::size_t i = 0; i < gx1.size(); ++i) REQUIRE(gx1[i] == doctest::Approx(gx2[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < gw1.size(); ++i) REQUIRE(gw1[i] == doctest::Approx(gw2[i]).epsilon(1e-12));
  }
}

TEST_CASE("a node used twice accumulates both gradient paths") {
  DTensor x({1, 2}, {1.5, -2.0}, true);
  DTensor w({1, 2}, {0.5, 0.25}, true);
  DTensor b({1}, {0.0}, false);
  const DTensor y = linear(x, w, b);  // 1 x 1
  const DTensor z = add(y, y);
  DTensor loss = mean_over_axis(mean_over_axis(z, 1), 0);
  loss.backward();
  CHECK(x.grad()[0] == doctest::Approx(1.0));
  CHECK(x.grad()[1] == doctest::Approx(0.5));
  CHECK(w.grad()[0] == doctest::Approx(3.0));
  CHECK(w.grad()[1] == doctest::Approx(-4.0));
}

TEST_CASE("no graph is recorded under NoGradGuard") {
  DTensor x({2, 2}, {1, 2, 3, 4}, true);
  {
    NoGradGuard guard;
    const DTensor y = add(x, x);
    CHECK_FALSE(y.requires_grad());
    CHECK(y.node().parents.empty());
  }
  CHECK(add(x, x).requires_grad());
}

TEST_CASE("frozen inputs receive no gradient") {
  DTensor x({1, 3}, {1, 2, 3}, true);
  DTensor w({2, 3}, {1, 0, 0, 0, 1, 0}, false);
  DTensor b({2}, {0, 0}, false);
  const std::vector<int> labels{1};
  DTensor loss = softmax_cross_entropy(linear(x, w, b), std::span<const int>(labels));
  loss.backward();
  CHECK(x.has_grad());
  CHECK_FALSE(w.has_grad());
}

TEST_CASE("cross entropy of uniform logits is ln K") {
  DTensor logits({3, 4}, std::vector<double>(12, 0.7), false);
  const std::vector<int> labels{0, 3, 2};
  CHECK(softmax_cross_entropy(logits, std::span<const int>(labels)).item() == doctest::Approx(std::log(4.0)));
  const std::vector<int> bad{0, 4, 1};
  CHECK_THROWS_AS(softmax_cross_entropy(logits, std::span<const int>(bad)), std::out_of_range);
}

TEST_CASE("statistics pooling values") {
  // One channel, frames {1, 3}: mean 2, population std 1.
  DTensor x({1, 1, 2}, {1.0, 3.0}, false);
  const auto y = mean_std_over_time(x, 0.0);
  CHECK(y.shape() == Shape{1, 2});
  CHECK(y.data()[0] == 2.0);
  CHECK(y.data()[1] == 1.0);
}

TEST_CASE("max pool routes gradient to the first maximum") {
  DTensor x({1, 1, 2, 2}, {5, 5, 1, 2}, true);
  DTensor y = max_pool2d(x, Pool2dParams{2, 2, 0});
  CHECK(y.data()[0] == 5.0);
  DTensor loss = mean_over_axis(mean_over_axis(mean_over_axis(mean_over_axis(y, 3), 2), 1), 0);
  loss.backward();
  CHECK(x.grad()[0] == 1.0);
  CHECK(x.grad()[1] == 0.0);
}

TEST_CASE("batch norm running statistics") {
  DTensor x({4, 1}, {1, 2, 3, 4}, false);
  DTensor gamma({1}, {1.0}, false), beta({1}, {0.0}, false);
  std::vector<double> rm{0.0}, rv{1.0};
  batch_norm(x, gamma, beta, rm, rv, BatchNormOptions{true, 0.1, 1e-5});
  CHECK(rm[0] == doctest::Approx(0.25));                 // 0.1 * 2.5
  CHECK(rv[0] == doctest::Approx(0.9 + 0.1 * 5.0 / 3.0));  // unbiased variance 5/3
  const auto before = rm;
  batch_norm(x, gamma, beta, rm, rv, BatchNormOptions{false, 0.1, 1e-5});
  CHECK(rm == before);
}

TEST_CASE("shape mismatches throw") {
  DTensor a({2, 3}), b({3, 2});
  CHECK_THROWS_AS(add(a, b), std::invalid_argument);
  DTensor x({1, 2, 4, 4}), w({3, 1, 3, 3});
  CHECK_THROWS_AS(conv2d(x, w, Conv2dParams{}), std::invalid_argument);
}

TEST_CASE("finite checks flag NaN outputs") {
  const bool saved = finite_checks();
  set_finite_checks(true);
  DTensor a({1}, {std::nan("")}, false), b({1}, {1.0}, false);
  CHECK_THROWS_AS(add(a, b), NumericError);
  set_finite_checks(saved);
}

TEST_CASE("sgd momentum update") {
  std::vector<double> w{1.0, -1.0}, v{0.0, 0.0};
  const std::vector<double> g{0.5, 1.0};
  sgd_step<double>(w, g, v, 0.9, 0.1);
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(w[0] == doctest::Approx(0.95));
  sgd_step<double>(w, g, v, 0.9, 0.1);
  CHECK(v[0] == doctest::Approx(0.95));
  CHECK(w[0] == doctest::Approx(0.855));
  CHECK(w[1] == doctest::Approx(-1.0 - 0.1 - 0.19));
}

TEST_CASE("optimizer skips frozen parameters") {
  Tensor<float> a({2}, {1.0f, 2.0f}, true), b({2}, {3.0f, 4.0f}, false);
  a.grad()[0] = 1.0f;
  b.grad()[0] = 1.0f;
  SgdMomentum opt({a, b}, 0.9);
  opt.set_lr(0.5);
  opt.step();
  CHECK(a.data()[0] == 0.5f);
  CHECK(b.data()[0] == 3.0f);
}

TEST_CASE("learning-rate schedule") {
  LrSchedule s;
  for (int e = 1; e <= 8; ++e) CHECK(s.lr_at_epoch(e) == 1e-2);
  CHECK(s.lr_at_epoch(9) == 5e-3);
  CHECK(s.lr_at_epoch(10) == 5e-3);
  CHECK(s.lr_at_epoch(11) == 2.5e-3);
  CHECK(s.lr_at_epoch(12) == 2.5e-3);
  CHECK(s.lr_at_epoch(13) == 1.25e-3);
}
