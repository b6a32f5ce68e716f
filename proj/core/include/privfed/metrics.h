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

#ifndef PRIVFED_METRICS_H_
#define PRIVFED_METRICS_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace privfed {

struct MetricSet {
  double auc = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  size_t n_pos = 0;
  size_t n_neg = 0;
  double threshold = 0.5;

  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

// Mann-Whitney statistic with midranks: P(s+ > s-) + 0.5 * P(s+ == s-).
// Throws kMetric unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

// Predicted positive iff score >= threshold. Returns (sensitivity, specificity).
std::pair<double, double> sensitivity_specificity(std::span<const double> scores,
                                                  std::span<const int> labels, double threshold);

MetricSet evaluate_scores(std::span<const double> scores, std::span<const int> labels,
                          double threshold);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value

  friend bool operator==(const MeanStd&, const MeanStd&) = default;
};

MeanStd mean_std(std::span<const double> values);

struct MetricSummary {
  MeanStd auc;
  MeanStd sensitivity;
  MeanStd specificity;

  friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

MetricSummary summarize(std::span<const MetricSet> sets);

}  // namespace privfed

#endif  // PRIVFED_METRICS_H_
