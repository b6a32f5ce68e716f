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

#ifndef PRIVFED_EXPERIMENT_H_
#define PRIVFED_EXPERIMENT_H_

#include <vector>

#include "privfed/config.h"
#include "privfed/report.h"

namespace privfed {

// Centralized baseline: k-fold cross-validation on the pooled site data
// (train and validation splits alike). Reported as method "cML".
RunReport run_central(const ExperimentConfig& cfg);

struct CalibrationPoint {
  double multiplier = 0.0;
  double auc = 0.0;  // of the generating linear predictor on pooled data
};

// AUC of the true linear score beta * x on generated pooled data, for each
// multiplier applied to the configured coefficients.
std::vector<CalibrationPoint> calibrate_coefficients(const ExperimentConfig& cfg,
                                                     const std::vector<double>& multipliers);

}  // namespace privfed

#endif  // PRIVFED_EXPERIMENT_H_
