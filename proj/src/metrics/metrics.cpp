// src/metrics/metrics.cpp

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

#include "emoser/metrics/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace emoser::metrics {

using nlohmann::json;

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_names)
    : names_(std::move(class_names)), counts_(names_.size() * names_.size(), 0) {}

void ConfusionMatrix::accumulate(int true_label, int predicted_label) {
  const int k = num_classes();
  if (true_label < 0 || true_label >= k || predicted_label < 0 || predicted_label >= k) {
    throw std::out_of_range("confusion matrix: label pair (" + std::to_string(true_label) + ", " +
                            std::to_string(predicted_label) + ") outside [0, " + std::to_string(k) + ")");
  }
  ++counts_[std::size_t(true_label) * k + predicted_label];
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.names_ != names_) throw std::invalid_argument("confusion matrix: class lists differ");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::int64_t ConfusionMatrix::at(int t, int p) const {
  return counts_.at(std::size_t(t) * num_classes() + p);
}

std::int64_t ConfusionMatrix::row_sum(int t) const {
  std::int64_t s = 0;
  for (int p = 0; p < num_classes(); ++p) s += at(t, p);
  return s;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t s = 0;
  for (int i = 0; i < num_classes(); ++i) s += at(i, i);
  return s;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

double weighted_accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw std::domain_error("weighted accuracy of an empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

double unweighted_accuracy(const ConfusionMatrix& cm, std::vector<int>* unsupported) {
  double sum = 0.0;
  int supported = 0;
  if (unsupported) unsupported->clear();
  for (int i = 0; i < cm.num_classes(); ++i) {
    const auto support = cm.row_sum(i);
    if (support == 0) {
      if (unsupported) unsupported->push_back(i);
      continue;
    }
    sum += static_cast<double>(cm.at(i, i)) / static_cast<double>(support);
    ++supported;
  }
  if (supported == 0) throw std::domain_error("unweighted accuracy: no class has test samples");
  return sum / supported;
}

MetricsReport make_report(const ConfusionMatrix& cm, int fold) {
  MetricsReport r;
  r.fold = fold;
  r.wa = weighted_accuracy(cm);
  r.ua = unweighted_accuracy(cm, &r.unsupported_classes);
  r.n_total = cm.total();
  r.confusion = cm;
  for (int i = 0; i < cm.num_classes(); ++i) {
    const auto support = cm.row_sum(i);
    r.per_class_recall.push_back(support ? static_cast<double>(cm.at(i, i)) / support
                                         : std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) throw std::domain_error("mean of an empty list");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double population_std(const std::vector<double>& values) {
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

FoldSummary average_over_folds(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("average_over_folds: no reports");
  std::vector<double> wa, ua;
  FoldSummary s;
  s.pooled = ConfusionMatrix(reports.front().confusion.class_names());
  for (const auto& r : reports) {
    wa.push_back(r.wa);
    ua.push_back(r.ua);
    s.pooled.merge(r.confusion);
  }
  s.wa_mean = mean_of(wa);
  s.wa_std = population_std(wa);
  s.ua_mean = mean_of(ua);
  s.ua_std = population_std(ua);
  return s;
}

json confusion_to_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (int i = 0; i < cm.num_classes(); ++i) {
    json row = json::array();
    for (int j = 0; j < cm.num_classes(); ++j) row.push_back(cm.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

ConfusionMatrix confusion_from_json(const json& counts, std::vector<std::string> class_names) {
  ConfusionMatrix cm(std::move(class_names));
  const int k = cm.num_classes();
  if (!counts.is_array() || static_cast<int>(counts.size()) != k) {
    throw std::invalid_argument("confusion matrix JSON does not match class count");
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const auto n = counts.at(i).at(j).get<std::int64_t>();
      for (std::int64_t c = 0; c < n; ++c) cm.accumulate(i, j);
    }
  }
  return cm;
}

json report_to_json(const MetricsReport& r) {
  json recall = json::array();
  for (double v : r.per_class_recall) {
    recall.push_back(std::isnan(v) ? json(nullptr) : json(v));
  }
  return {{"fold", r.fold},
          {"wa", r.wa},
          {"ua", r.ua},
          {"per_class_recall", recall},
          {"unsupported_classes", r.unsupported_classes},
          {"n_total", r.n_total},
          {"confusion", confusion_to_json(r.confusion)}};
}

json metrics_json(const std::string& experiment, const std::vector<MetricsReport>& reports,
                  const FoldSummary& summary) {
  json folds = json::array();
  for (const auto& r : reports) folds.push_back(report_to_json(r));
  return {{"experiment", experiment},
          {"classes", summary.pooled.class_names()},
          {"folds", folds},
          {"summary",
           {{"wa_mean", summary.wa_mean},
            {"wa_std", summary.wa_std},
            {"ua_mean", summary.ua_mean},
            {"ua_std", summary.ua_std},
            {"pooled_confusion", confusion_to_json(summary.pooled)}}}};
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "true\\pred";
  for (const auto& n : cm.class_names()) out << ',' << n;
  out << '\n';
  for (int i = 0; i < cm.num_classes(); ++i) {
    out << cm.class_names()[i];
    for (int j = 0; j < cm.num_classes(); ++j) out << ',' << cm.at(i, j);
    out << '\n';
  }
  return out.str();
}

std::string confusion_percent_table(const ConfusionMatrix& cm) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-10s", "");
  out << buf;
  for (const auto& n : cm.class_names()) {
    std::snprintf(buf, sizeof(buf), "%10s", n.c_str());
    out << buf;
  }
  out << '\n';
  for (int i = 0; i < cm.num_classes(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-10s", cm.class_names()[i].c_str());
    out << buf;
    const auto support = cm.row_sum(i);
    for (int j = 0; j < cm.num_classes(); ++j) {
      const double pct = support ? 100.0 * cm.at(i, j) / support : 0.0;
      std::snprintf(buf, sizeof(buf), "%10.2f", pct);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string format_result_row(const std::string& label, double ua, double wa) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-32s UA [%%] %6.2f   WA [%%] %6.2f", label.c_str(), 100.0 * ua,
                100.0 * wa);
  return buf;
}

}  // namespace emoser::metrics
