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

#include "privfed/ckks/ckks.h"
#include "privfed/ckks/packing.h"
#include "privfed/learners.h"

namespace privfed::ckks {
namespace {

struct Fixture {
  ContextPtr ctx = make_context(CkksParams::standard());
  Rng rng{1};
  KeyPair keys = keygen(*ctx, rng);
  std::vector<double> values;

  Fixture() {
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    values.resize(ctx->params().slot_count());
    for (double& v : values) v = u(g);
  }
  Ciphertext fresh() { return encrypt(*ctx, encode(*ctx, values, ctx->params().scale()), keys.public_key, rng); }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_Encode(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(encode(*f.ctx, f.values, f.ctx->params().scale()));
}
BENCHMARK(BM_Encode)->Unit(benchmark::kMicrosecond);

void BM_Encrypt(benchmark::State& state) {
  auto& f = fixture();
  const PlainPoly pt = encode(*f.ctx, f.values, f.ctx->params().scale());
  for (auto _ : state) benchmark::DoNotOptimize(encrypt(*f.ctx, pt, f.keys.public_key, f.rng));
}
BENCHMARK(BM_Encrypt)->Unit(benchmark::kMicrosecond);

void BM_Add(benchmark::State& state) {
  auto& f = fixture();
  const Ciphertext a = f.fresh(), b = f.fresh();
  for (auto _ : state) benchmark::DoNotOptimize(add(*f.ctx, a, b));
}
BENCHMARK(BM_Add)->Unit(benchmark::kMicrosecond);

void BM_MulScalarRescale(benchmark::State& state) {
  auto& f = fixture();
  const Ciphertext a = f.fresh();
  for (auto _ : state) benchmark::DoNotOptimize(mul_scalar_rescale(*f.ctx, a, 0.25));
}
BENCHMARK(BM_MulScalarRescale)->Unit(benchmark::kMicrosecond);

void BM_DecryptDecode(benchmark::State& state) {
  auto& f = fixture();
  const Ciphertext a = f.fresh();
  for (auto _ : state) benchmark::DoNotOptimize(decode(*f.ctx, decrypt(*f.ctx, a, f.keys.secret)));
}
BENCHMARK(BM_DecryptDecode)->Unit(benchmark::kMicrosecond);

void BM_Serialize(benchmark::State& state) {
  auto& f = fixture();
  const Ciphertext a = f.fresh();
  for (auto _ : state) benchmark::DoNotOptimize(serialize_ct(*f.ctx, a));
  state.counters["bytes"] = static_cast<double>(serialize_ct(*f.ctx, a).size());
}
BENCHMARK(BM_Serialize)->Unit(benchmark::kMicrosecond);

// Full client-side encryption of one model update, per learner.
void BM_EncryptUpdate(benchmark::State& state) {
  auto& f = fixture();
  const auto kind = static_cast<ModelKind>(state.range(0));
  const LayoutManifest manifest = model_layout(kind);
  const std::vector<double> delta(manifest.total_length(), 0.01);
  size_t bytes = 0;
  for (auto _ : state) {
    const auto cts = encrypt_update(*f.ctx, delta, manifest, Packing::kPerTensor, f.keys.public_key, f.rng);
    bytes = 0;
    for (const auto& ct : cts) bytes += serialize_ct(*f.ctx, ct).size();
  }
  state.SetLabel(std::string(to_string(kind)));
  state.counters["payload_bytes"] = static_cast<double>(bytes);
}
BENCHMARK(BM_EncryptUpdate)
    ->Arg(static_cast<int>(ModelKind::kLogisticRegression))
    ->Arg(static_cast<int>(ModelKind::kFeedForwardNN))
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace privfed::ckks
