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
#include <vector>

#include <benchmark/benchmark.h>

#include "privfed/laplace.h"
#include "privfed/rng.h"
#include "privfed/svt.h"

namespace privfed {
namespace {

void BM_LaplaceSample(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(laplace_sample(rng, 1.0));
}
BENCHMARK(BM_LaplaceSample);

// 11 and 66 are the logistic-regression and network parameter counts.
void BM_SvtFilter(benchmark::State& state) {
  std::mt19937_64 g(2);
  std::normal_distribution<double> d(0.0, 0.05);
  std::vector<double> delta(static_cast<size_t>(state.range(0)));
  for (double& v : delta) v = d(g);
  const SvtConfig cfg;
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(svt_filter(delta, 40, cfg, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SvtFilter)->Arg(11)->Arg(66)->Arg(4096);

}  // namespace
}  // namespace privfed
