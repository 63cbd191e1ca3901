// tests/unit/test_metrics.cpp

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

#include "emoser/common/rng.hpp"
#include "emoser/metrics/metrics.hpp"

using namespace emoser;
using namespace emoser::metrics;

namespace {

ConfusionMatrix from_rows(const std::vector<std::vector<int>>& rows) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < rows.size(); ++i) names.push_back("c" + std::to_string(i));
  ConfusionMatrix cm(names);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      for (int n = 0; n < rows[i][j]; ++n) cm.accumulate(int(i), int(j));
  return cm;
}

}  // namespace

TEST_CASE("accumulate") {
  ConfusionMatrix cm({"a", "b"});
  cm.accumulate(0, 0);
  CHECK(cm.at(0, 0) == 1);
  CHECK(cm.total() == 1);
  CHECK_THROWS_AS(cm.accumulate(2, 0), std::out_of_range);
  CHECK_THROWS_AS(cm.accumulate(0, -1), std::out_of_range);
}

TEST_CASE("WA and UA on hand-computed matrices") {
  const auto cm = from_rows({{2, 0}, {1, 1}});
  CHECK(weighted_accuracy(cm) == 0.75);
  CHECK(unweighted_accuracy(cm) == 0.75);
  CHECK(weighted_accuracy(from_rows({{3, 0}, {0, 5}})) == 1.0);
  CHECK(weighted_accuracy(from_rows({{0, 3}, {5, 0}})) == 0.0);

  std::vector<int> unsupported;
  const auto partial = from_rows({{9, 1}, {0, 0}});
  CHECK(unweighted_accuracy(partial, &unsupported) == 0.9);
  CHECK(unsupported == std::vector<int>{1});
  const auto report = make_report(partial, 2);
  CHECK(report.unsupported_classes == std::vector<int>{1});
  CHECK(std::isnan(report.per_class_recall[1]));
  CHECK(report.fold == 2);

  CHECK_THROWS_AS(weighted_accuracy(ConfusionMatrix({"a"})), std::domain_error);
  CHECK_THROWS(unweighted_accuracy(ConfusionMatrix({"a", "b"})));
}

TEST_CASE("balanced matrices have UA equal to WA") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = int(rng.uniform_int(2, 5)), support = int(rng.uniform_int(1, 12));
    std::vector<std::vector<int>> rows(k, std::vector<int>(k, 0));
    for (int i = 0; i < k; ++i)
      for (int n = 0; n < support; ++n) rows[i][rng.uniform_int(0, k - 1)]++;
    const auto cm = from_rows(rows);
    REQUIRE(unweighted_accuracy(cm) == doctest::Approx(weighted_accuracy(cm)));
  }
}

TEST_CASE("accumulation order does not matter") {
  Rng rng(1);
  std::vector<std::pair<int, int>> stream;
  for (int i = 0; i < 200; ++i) stream.emplace_back(int(rng.uniform_int(0, 3)), int(rng.uniform_int(0, 3)));
  ConfusionMatrix a({"a", "b", "c", "d"}), b({"a", "b", "c", "d"});
  for (auto [t, p] : stream) a.accumulate(t, p);
  rng.shuffle(stream.begin(), stream.end());
  for (auto [t, p] : stream) b.accumulate(t, p);
  CHECK(a == b);
}

TEST_CASE("fold averaging uses the population std") {
  MetricsReport r1, r2;
  r1.wa = 0.6;
  r2.wa = 0.8;
  r1.ua = r2.ua = 0.5;
  r1.confusion = r2.confusion = from_rows({{1, 0}, {0, 1}});
  const auto s = average_over_folds({r1, r2});
  CHECK(s.wa_mean == doctest::Approx(0.7));
  CHECK(s.wa_std == doctest::Approx(0.1));
  CHECK(s.ua_std == 0.0);
  CHECK(s.pooled.total() == 4);
}

TEST_CASE("pooled WA is the count-weighted mean of fold WAs") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<MetricsReport> reports;
    std::int64_t num = 0, den = 0;
    for (int f = 0; f < 5; ++f) {
      std::vector<std::vector<int>> rows(3, std::vector<int>(3, 0));
      const int n = int(rng.uniform_int(1, 40));
      for (int i = 0; i < n; ++i) rows[rng.uniform_int(0, 2)][rng.uniform_int(0, 2)]++;
      const auto cm = from_rows(rows);
      reports.push_back(make_report(cm, f));
      num += cm.trace();
      den += cm.total();
    }
    const auto s = average_over_folds(reports);
    // Integer identity: sum_f trace_f == trace(pooled), sum_f total_f == total(pooled).
    REQUIRE(s.pooled.trace() == num);
    REQUIRE(s.pooled.total() == den);
  }
}

TEST_CASE("formatting and serialization") {
  CHECK(format_result_row("Exp 1", 0.6161, 0.6602).find("UA [%]  61.61") != std::string::npos);
  CHECK(format_result_row("Exp 1", 0.6161, 0.6602).find("WA [%]  66.02") != std::string::npos);
  const auto cm = from_rows({{2, 0}, {1, 1}});
  CHECK(confusion_csv(cm) == "true\\pred,c0,c1\nc0,2,0\nc1,1,1\n");
  CHECK(confusion_from_json(confusion_to_json(cm), cm.class_names()) == cm);
  const auto report = make_report(cm, 0);
  const auto j = metrics_json("exp1", {report}, average_over_folds({report}));
  CHECK(j["folds"][0]["wa"] == 0.75);
  CHECK(j["summary"]["wa_mean"] == 0.75);
  CHECK(j["summary"].contains("pooled_confusion"));
  CHECK(confusion_percent_table(cm).find("50.00") != std::string::npos);
}
