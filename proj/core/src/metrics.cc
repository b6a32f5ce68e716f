// Copyright 2026 The privfed Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privfed/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "privfed/error.h"

namespace privfed {
namespace {

std::pair<size_t, size_t> class_counts(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::kMetric, "scores and labels differ in length");
  }
  size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorKind::kMetric, "labels must be 0 or 1");
    pos += static_cast<size_t>(y);
  }
  const size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorKind::kMetric, "metric needs both classes present");
  return {pos, neg};
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  const auto [pos, neg] = class_counts(scores, labels);
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Sum of (1-based) midranks of the positives.
  double rank_sum = 0.0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

std::pair<double, double> sensitivity_specificity(std::span<const double> scores,
                                                  std::span<const int> labels, double threshold) {
  const auto [pos, neg] = class_counts(scores, labels);
  size_t tp = 0, tn = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1 && predicted) ++tp;
    if (labels[i] == 0 && !predicted) ++tn;
  }
  return {static_cast<double>(tp) / static_cast<double>(pos),
          static_cast<double>(tn) / static_cast<double>(neg)};
}

MetricSet evaluate_scores(std::span<const double> scores, std::span<const int> labels,
                          double threshold) {
  MetricSet m;
  m.auc = auc(scores, labels);
  std::tie(m.sensitivity, m.specificity) = sensitivity_specificity(scores, labels, threshold);
  m.n_pos = static_cast<size_t>(std::count(labels.begin(), labels.end(), 1));
  m.n_neg = labels.size() - m.n_pos;
  m.threshold = threshold;
  return m;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

MetricSummary summarize(std::span<const MetricSet> sets) {
  std::vector<double> a, s, p;
  for (const auto& m : sets) {
    a.push_back(m.auc);
    s.push_back(m.sensitivity);
    p.push_back(m.specificity);
  }
  return {mean_std(a), mean_std(s), mean_std(p)};
}

}  // namespace privfed
