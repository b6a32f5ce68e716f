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

#include "privfed/learners.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "privfed/error.h"
#include "privfed/rng.h"

namespace privfed {
namespace {

constexpr size_t kLrCoef = 0;
constexpr size_t kLrIntercept = kFeatureCount;

constexpr size_t kHiddenW = 0;
constexpr size_t kLnGain = kHiddenW + kHiddenUnits * kFeatureCount;
constexpr size_t kLnBias = kLnGain + kHiddenUnits;
constexpr size_t kOutW = kLnBias + kHiddenUnits;
constexpr size_t kOutB = kOutW + kHiddenUnits;
constexpr size_t kNnSize = kOutB + 1;

static_assert(kNnSize == 66);

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// -log(sigmoid(z)) if y = 1, -log(1 - sigmoid(z)) if y = 0.
double bce_from_logit(double z, int y) {
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return softplus - (y == 1 ? z : 0.0);
}

void check_finite(const Features& x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInput, "non-finite feature value");
  }
}

struct NnForward {
  std::array<double, kHiddenUnits> pre{};   // W x
  std::array<double, kHiddenUnits> norm{};  // normalized activations
  double inv_std = 0.0;
  double logit = 0.0;
};

NnForward nn_forward(std::span<const double> p, const Features& x) {
  NnForward f;
  std::array<double, kHiddenUnits> h{};
  for (size_t u = 0; u < kHiddenUnits; ++u) {
    double s = 0.0;
    for (size_t j = 0; j < kFeatureCount; ++j) s += p[kHiddenW + u * kFeatureCount + j] * x[j];
    f.pre[u] = s;
    h[u] = std::max(s, 0.0);
  }
  double mean = 0.0;
  for (double v : h) mean += v;
  mean /= kHiddenUnits;
  double var = 0.0;
  for (double v : h) var += (v - mean) * (v - mean);
  var /= kHiddenUnits;
  f.inv_std = 1.0 / std::sqrt(var + kLayerNormEpsilon);
  f.logit = p[kOutB];
  for (size_t u = 0; u < kHiddenUnits; ++u) {
    f.norm[u] = (h[u] - mean) * f.inv_std;
    const double z = p[kLnGain + u] * f.norm[u] + p[kLnBias + u];
    f.logit += p[kOutW + u] * z;
  }
  return f;
}

double lr_logit(std::span<const double> p, const Features& x) {
  double z = p[kLrIntercept];
  for (size_t j = 0; j < kFeatureCount; ++j) z += p[kLrCoef + j] * x[j];
  return z;
}

// Accumulates d(BCE)/d(params) for one row into `grad`; returns the loss.
double accumulate_row(ModelKind kind, std::span<const double> p, const Record& r,
                      std::span<double> grad) {
  if (kind == ModelKind::kLogisticRegression) {
    const double z = lr_logit(p, r.x);
    const double d = sigmoid(z) - r.label;
    for (size_t j = 0; j < kFeatureCount; ++j) grad[kLrCoef + j] += d * r.x[j];
    grad[kLrIntercept] += d;
    return bce_from_logit(z, r.label);
  }

  const NnForward f = nn_forward(p, r.x);
  const double d = sigmoid(f.logit) - r.label;
  grad[kOutB] += d;
  std::array<double, kHiddenUnits> d_norm{};
  for (size_t u = 0; u < kHiddenUnits; ++u) {
    const double z = p[kLnGain + u] * f.norm[u] + p[kLnBias + u];
    grad[kOutW + u] += d * z;
    const double dz = d * p[kOutW + u];
    grad[kLnGain + u] += dz * f.norm[u];
    grad[kLnBias + u] += dz;
    d_norm[u] = dz * p[kLnGain + u];
  }
  // LayerNorm backward: dh = inv_std * (dn - mean(dn) - n * mean(dn * n)).
  double mean_dn = 0.0, mean_dn_n = 0.0;
  for (size_t u = 0; u < kHiddenUnits; ++u) {
    mean_dn += d_norm[u];
    mean_dn_n += d_norm[u] * f.norm[u];
  }
  mean_dn /= kHiddenUnits;
  mean_dn_n /= kHiddenUnits;
  for (size_t u = 0; u < kHiddenUnits; ++u) {
    if (f.pre[u] <= 0.0) continue;
    const double dh = f.inv_std * (d_norm[u] - mean_dn - f.norm[u] * mean_dn_n);
    for (size_t j = 0; j < kFeatureCount; ++j) grad[kHiddenW + u * kFeatureCount + j] += dh * r.x[j];
  }
  return bce_from_logit(f.logit, r.label);
}

// Adds the L2 term over weight matrices; returns its contribution to the loss.
double add_l2(ModelKind kind, std::span<const double> p, std::span<double> grad, double l2) {
  if (l2 == 0.0) return 0.0;
  auto apply = [&](size_t begin, size_t end) {
    double sq = 0.0;
    for (size_t i = begin; i < end; ++i) {
      sq += p[i] * p[i];
      grad[i] += l2 * p[i];
    }
    return sq;
  };
  double sq = 0.0;
  if (kind == ModelKind::kLogisticRegression) {
    sq = apply(kLrCoef, kLrCoef + kFeatureCount);
  } else {
    sq = apply(kHiddenW, kLnGain) + apply(kOutW, kOutB);
  }
  return 0.5 * l2 * sq;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kLogisticRegression ? "lr" : "nn";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "lr" || name == "LR") return ModelKind::kLogisticRegression;
  if (name == "nn" || name == "NN") return ModelKind::kFeedForwardNN;
  throw Error(ErrorKind::kConfiguration, "unknown model kind '" + std::string(name) + "'");
}

size_t parameter_count(ModelKind kind) {
  return kind == ModelKind::kLogisticRegression ? kFeatureCount + 1 : kNnSize;
}

LayoutManifest model_layout(ModelKind kind) {
  if (kind == ModelKind::kLogisticRegression) {
    return LayoutManifest({{"coef", {kFeatureCount}, kLrCoef}, {"intercept", {1}, kLrIntercept}});
  }
  return LayoutManifest({{"hidden_w", {kHiddenUnits, kFeatureCount}, kHiddenW},
                         {"ln_gain", {kHiddenUnits}, kLnGain},
                         {"ln_bias", {kHiddenUnits}, kLnBias},
                         {"out_w", {1, kHiddenUnits}, kOutW},
                         {"out_b", {1}, kOutB}});
}

ParamSet init_params(ModelKind kind, uint64_t seed) {
  FlatVector flat(parameter_count(kind), 0.0);
  if (kind == ModelKind::kFeedForwardNN) {
    Rng rng(seed);
    auto xavier = [&](size_t begin, size_t fan_in, size_t fan_out) {
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (size_t i = 0; i < fan_in * fan_out; ++i) flat[begin + i] = dist(rng);
    };
    xavier(kHiddenW, kFeatureCount, kHiddenUnits);
    std::fill(flat.begin() + kLnGain, flat.begin() + kLnBias, 1.0);
    xavier(kOutW, kHiddenUnits, 1);
  }
  return unflatten(flat, model_layout(kind));
}

double forward_flat(ModelKind kind, std::span<const double> params, const Features& x) {
  check_finite(x);
  if (params.size() != parameter_count(kind)) {
    throw Error(ErrorKind::kStructural, "parameter vector has the wrong length for the model");
  }
  const double logit = kind == ModelKind::kLogisticRegression ? lr_logit(params, x)
                                                              : nn_forward(params, x).logit;
  return sigmoid(logit);
}

double forward(ModelKind kind, const ParamSet& params, const Features& x) {
  return forward_flat(kind, flatten(params).values, x);
}

LossGradient loss_and_gradient(ModelKind kind, std::span<const double> params,
                               std::span<const Record> rows, double l2_penalty) {
  if (params.size() != parameter_count(kind)) {
    throw Error(ErrorKind::kStructural, "parameter vector has the wrong length for the model");
  }
  if (rows.empty()) throw Error(ErrorKind::kInput, "loss over an empty batch");
  LossGradient out;
  out.gradient.assign(params.size(), 0.0);
  double loss = 0.0;
  for (const Record& r : rows) loss += accumulate_row(kind, params, r, out.gradient);
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (double& g : out.gradient) g *= inv_n;
  out.loss = loss * inv_n + add_l2(kind, params, out.gradient, l2_penalty);
  return out;
}

TrainResult train_local(ModelKind kind, const ParamSet& params, const CohortDataset& train,
                        const TrainConfig& cfg) {
  if (train.empty()) throw Error(ErrorKind::kInput, "training set is empty");
  if (cfg.batch_size == 0) throw Error(ErrorKind::kInput, "batch_size must be positive");
  if (!(cfg.learning_rate > 0.0)) throw Error(ErrorKind::kInput, "learning_rate must be positive");
  const auto start = std::chrono::steady_clock::now();

  Flattened flat = flatten(params);
  FlatVector& p = flat.values;
  if (p.size() != parameter_count(kind)) {
    throw Error(ErrorKind::kStructural, "parameter set does not match the model kind");
  }
  const size_t n = train.size();
  std::vector<size_t> order(n);
  std::vector<Record> batch;
  batch.reserve(std::min(cfg.batch_size, n));

  TrainStats stats;
  double loss_sum = 0.0;
  for (size_t epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(derive_seed(cfg.seed, {epoch}));
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t begin = 0; begin < n; begin += cfg.batch_size) {
      const size_t end = std::min(n, begin + cfg.batch_size);
      batch.clear();
      for (size_t i = begin; i < end; ++i) batch.push_back(train.rows[order[i]]);
      const LossGradient lg = loss_and_gradient(kind, p, batch, cfg.l2_penalty);
      for (size_t i = 0; i < p.size(); ++i) p[i] -= cfg.learning_rate * lg.gradient[i];
      loss_sum += lg.loss;
      ++stats.steps;
    }
  }
  stats.mean_loss = stats.steps > 0 ? loss_sum / static_cast<double>(stats.steps) : 0.0;
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {unflatten(p, flat.manifest), stats};
}

std::vector<double> predict_batch(ModelKind kind, const ParamSet& params, const CohortDataset& ds) {
  const FlatVector p = flatten(params).values;
  std::vector<double> out;
  out.reserve(ds.size());
  for (const auto& r : ds.rows) out.push_back(forward_flat(kind, p, r.x));
  return out;
}

}  // namespace privfed
