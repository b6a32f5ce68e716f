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

#include "privfed/experiment.h"

#include <chrono>

#include "privfed/error.h"
#include "privfed/federation.h"
#include "privfed/learners.h"
#include "privfed/metrics.h"
#include "privfed/rng.h"

namespace privfed {
namespace {

inline constexpr uint64_t kFoldStream = 5;

std::vector<int> labels_of(const CohortDataset& ds) {
  std::vector<int> labels;
  labels.reserve(ds.size());
  for (const auto& r : ds.rows) labels.push_back(r.label);
  return labels;
}

}  // namespace

RunReport run_central(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;
  report.method = "cML";
  report.learner = cfg.model == ModelKind::kLogisticRegression ? "LR" : "NN";
  report.config = cfg.to_json();
  report.environment = cfg.environment_json();

  std::vector<CohortDataset> parts;
  for (auto& [name, split] : load_all_sites(cfg)) {
    parts.push_back(std::move(split.train));
    parts.push_back(std::move(split.valid));
  }
  std::vector<const CohortDataset*> ptrs;
  for (const auto& p : parts) ptrs.push_back(&p);
  const CohortDataset pooled = concat(ptrs);

  const ParamSet init = init_params(cfg.model, derive_seed(cfg.seed, {kInitStream}));
  report.initial_params = flatten(init).values;

  const auto folds = kfold_split(pooled, cfg.central.folds, derive_seed(cfg.seed, {kFoldStream}));
  std::vector<EvalRow> rows;
  for (size_t k = 0; k < folds.size(); ++k) {
    const TrainConfig tc{cfg.learning_rate, cfg.central.batch_size, cfg.central.epochs, cfg.l2_penalty,
                         derive_seed(cfg.seed, {kTrainStream, k})};
    const TrainResult trained = train_local(cfg.model, init, folds[k].train, tc);
    const auto scores = predict_batch(cfg.model, trained.params, folds[k].valid);
    const auto labels = labels_of(folds[k].valid);
    rows.push_back({"fold_" + std::to_string(k), evaluate_scores(scores, labels, cfg.threshold)});
  }
  report.evaluation = make_eval_table("kfold", std::move(rows));
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::vector<CalibrationPoint> calibrate_coefficients(const ExperimentConfig& cfg,
                                                     const std::vector<double>& multipliers) {
  if (cfg.data.source != DataSource::kGenerate) {
    throw Error(ErrorKind::kConfiguration, "calibration needs generated data");
  }
  std::vector<CalibrationPoint> out;
  for (double m : multipliers) {
    GeneratorSpec spec = cfg.data.generator;
    for (double& b : spec.coefficients) b *= m;
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& site : generate_cohort(spec)) {
      for (const auto& r : site.data.rows) {
        double z = 0.0;
        for (size_t j = 0; j < kFeatureCount; ++j) z += spec.coefficients[j] * r.x[j];
        scores.push_back(z);
        labels.push_back(r.label);
      }
    }
    out.push_back({m, auc(scores, labels)});
  }
  return out;
}

}  // namespace privfed
