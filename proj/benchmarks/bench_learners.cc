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

#include <random>

#include <benchmark/benchmark.h>

#include "privfed/dataset.h"
#include "privfed/learners.h"
#include "privfed/metrics.h"

namespace privfed {
namespace {

CohortDataset synthetic(size_t n) {
  std::mt19937_64 g(4);
  std::normal_distribution<double> d;
  std::bernoulli_distribution b(0.3);
  CohortDataset ds;
  ds.feature_names = default_feature_names();
  ds.rows.resize(n);
  for (auto& r : ds.rows) {
    r.x[0] = d(g);
    for (size_t j = 1; j < kFeatureCount; ++j) r.x[j] = b(g) ? 1.0 : 0.0;
    r.label = b(g) ? 1 : 0;
  }
  return ds;
}

// One local epoch over 5000 rows with batch size 1000.
void BM_TrainLocalEpoch(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const CohortDataset ds = synthetic(5000);
  const ParamSet p = init_params(kind, 1);
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.batch_size = 1000;
  cfg.local_epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_local(kind, p, ds, cfg));
  state.SetLabel(std::string(to_string(kind)));
  state.SetItemsProcessed(state.iterations() * 5000);
}
BENCHMARK(BM_TrainLocalEpoch)
    ->Arg(static_cast<int>(ModelKind::kLogisticRegression))
    ->Arg(static_cast<int>(ModelKind::kFeedForwardNN))
    ->Unit(benchmark::kMicrosecond);

void BM_Auc(benchmark::State& state) {
  std::mt19937_64 g(5);
  std::normal_distribution<double> d;
  std::bernoulli_distribution b(0.1);
  const auto n = static_cast<size_t>(state.range(0));
  std::vector<double> s(n);
  std::vector<int> y(n);
  for (size_t i = 0; i < n; ++i) {
    s[i] = d(g);
    y[i] = b(g) ? 1 : 0;
  }
  y[0] = 1;
  y[1] = 0;
  for (auto _ : state) benchmark::DoNotOptimize(auc(s, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auc)->Arg(1000)->Arg(100000);

}  // namespace
}  // namespace privfed
