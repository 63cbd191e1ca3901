// include/emoser/metrics/metrics.hpp

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
#include <string>
#include <vector>

#include <json.hpp>

namespace emoser::metrics {

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> class_names);

  int num_classes() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& class_names() const { return names_; }

  // Throws std::out_of_range for labels outside [0, K).
  void accumulate(int true_label, int predicted_label);
  // Elementwise sum; class lists must agree.
  void merge(const ConfusionMatrix& other);

  std::int64_t at(int true_label, int predicted_label) const;
  std::int64_t row_sum(int true_label) const;
  std::int64_t trace() const;
  std::int64_t total() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::int64_t> counts_;
};

// trace / total. Throws std::domain_error on an empty matrix.
double weighted_accuracy(const ConfusionMatrix& cm);

// Mean recall over classes with nonzero support; classes without support
// are skipped and, if `unsupported` is given, listed there.
double unweighted_accuracy(const ConfusionMatrix& cm, std::vector<int>* unsupported = nullptr);

struct MetricsReport {
  int fold = 0;
  double wa = 0.0;
  double ua = 0.0;
  std::vector<double> per_class_recall;  // NaN where the class has no support
  std::vector<int> unsupported_classes;
  std::int64_t n_total = 0;
  ConfusionMatrix confusion;
};

MetricsReport make_report(const ConfusionMatrix& cm, int fold);

struct FoldSummary {
  double wa_mean = 0.0;
  double wa_std = 0.0;
  double ua_mean = 0.0;
  double ua_std = 0.0;
  ConfusionMatrix pooled;
};

// Arithmetic mean and population std of fold-level WA/UA, plus the pooled
// (summed) confusion matrix.
FoldSummary average_over_folds(const std::vector<MetricsReport>& reports);

double mean_of(const std::vector<double>& values);
double population_std(const std::vector<double>& values);

nlohmann::json report_to_json(const MetricsReport& r);
nlohmann::json metrics_json(const std::string& experiment, const std::vector<MetricsReport>& reports,
                            const FoldSummary& summary);
nlohmann::json confusion_to_json(const ConfusionMatrix& cm);
ConfusionMatrix confusion_from_json(const nlohmann::json& counts, std::vector<std::string> class_names);

// CSV with a header row and a leading column of class names.
std::string confusion_csv(const ConfusionMatrix& cm);

// Row-normalized percentages, two decimals.
std::string confusion_percent_table(const ConfusionMatrix& cm);

// "<label>  UA [%] xx.xx  WA [%] yy.yy"
std::string format_result_row(const std::string& label, double ua, double wa);

}  // namespace emoser::metrics
