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

#ifndef PRIVFED_LEARNERS_H_
#define PRIVFED_LEARNERS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "privfed/dataset.h"
#include "privfed/params.h"

namespace privfed {

// LogisticRegression: coef[10], intercept[1] (11 scalars).
// FeedForwardNN: hidden_w[5,10] (no bias) -> ReLU -> LayerNorm with
// ln_gain[5], ln_bias[5] -> out_w[1,5], out_b[1] (66 scalars).
enum class ModelKind { kLogisticRegression, kFeedForwardNN };

std::string_view to_string(ModelKind kind);      // "lr" / "nn"
ModelKind parse_model_kind(std::string_view name);

inline constexpr size_t kHiddenUnits = 5;
inline constexpr double kLayerNormEpsilon = 1e-5;

size_t parameter_count(ModelKind kind);
LayoutManifest model_layout(ModelKind kind);

struct TrainConfig {
  double learning_rate = 0.01;
  size_t batch_size = 20000;
  size_t local_epochs = 20;
  double l2_penalty = 1e-4;
  uint64_t seed = 0;
};

struct TrainStats {
  size_t steps = 0;
  double mean_loss = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  ParamSet params;
  TrainStats stats;
};

// Xavier-uniform weights, unit LayerNorm gain, zero biases; LR starts at zero.
ParamSet init_params(ModelKind kind, uint64_t seed);

// Event probability for one row. Throws kInput on non-finite features.
double forward(ModelKind kind, const ParamSet& params, const Features& x);
double forward_flat(ModelKind kind, std::span<const double> params, const Features& x);

struct LossGradient {
  double loss = 0.0;
  FlatVector gradient;
};

// Mean binary cross-entropy over `rows` plus (l2_penalty / 2) * ||w||^2,
// where w are the weight matrices (coef, hidden_w, out_w).
LossGradient loss_and_gradient(ModelKind kind, std::span<const double> params,
                               std::span<const Record> rows, double l2_penalty);

// Minibatch SGD, reshuffling the rows every epoch from a stream derived from
// (cfg.seed, epoch). Steps = local_epochs * ceil(n / batch_size).
TrainResult train_local(ModelKind kind, const ParamSet& params, const CohortDataset& train,
                        const TrainConfig& cfg);

std::vector<double> predict_batch(ModelKind kind, const ParamSet& params, const CohortDataset& ds);

}  // namespace privfed

#endif  // PRIVFED_LEARNERS_H_
