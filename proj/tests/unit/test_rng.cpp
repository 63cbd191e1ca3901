// tests/unit/test_rng.cpp

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

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "emoser/common/rng.hpp"

using emoser::Rng;
using emoser::derive_seed;

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("uniform_int stays in its closed range and hits both ends") {
  Rng rng(7);
  bool lo = false, hi = false;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.uniform_int(-3, 4);
    REQUIRE(v >= -3);
    REQUIRE(v <= 4);
    lo = lo || v == -3;
    hi = hi || v == 4;
  }
  CHECK(lo);
  CHECK(hi);
  CHECK(rng.uniform_int(5, 5) == 5);
}

TEST_CASE("uniform is in [0, 1)") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal draws have roughly zero mean and unit variance") {
  Rng rng(11);
  double s = 0, ss = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    ss += x * x;
  }
  CHECK(std::abs(s / n) < 0.03);
  CHECK(std::abs(ss / n - 1.0) < 0.05);
}

TEST_CASE("derived seeds differ by tag and id and are stable") {
  std::set<std::uint64_t> seen;
  for (int id = 0; id < 50; ++id) {
    seen.insert(derive_seed(1, "a", id));
    seen.insert(derive_seed(1, "b", id));
  }
  CHECK(seen.size() == 100);
  CHECK(derive_seed(9, "x", 3) == derive_seed(9, "x", 3));
  CHECK(derive_seed(9, "x", 3) != derive_seed(10, "x", 3));
}

TEST_CASE("shuffle is a permutation and depends on the seed") {
  std::vector<int> a(30), b(30);
  for (int i = 0; i < 30; ++i) a[i] = b[i] = i;
  Rng r1(1), r2(2);
  r1.shuffle(a.begin(), a.end());
  r2.shuffle(b.begin(), b.end());
  CHECK(a != b);
  std::sort(a.begin(), a.end());
  for (int i = 0; i < 30; ++i) CHECK(a[i] == i);
}
