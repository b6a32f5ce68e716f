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

#include "privfed/aggregate.h"

#include "privfed/error.h"

namespace privfed {
namespace {

double weight_sum(std::span<const double> weights, size_t expected) {
  if (weights.size() != expected) {
    throw Error(ErrorKind::kStructural, "one weight per client update is required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorKind::kInput, "client weights must be positive");
    total += w;
  }
  return total;
}

}  // namespace

FlatVector aggregate_plain(const std::vector<FlatVector>& updates, std::span<const double> weights) {
  if (updates.empty()) throw Error(ErrorKind::kStructural, "aggregation over zero updates");
  const double total = weight_sum(weights, updates.size());
  FlatVector sum(updates.front().size(), 0.0);
  for (const auto& u : updates) {
    if (u.size() != sum.size()) throw Error(ErrorKind::kStructural, "client updates differ in length");
    for (size_t i = 0; i < u.size(); ++i) sum[i] += u[i];
  }
  for (double& v : sum) v /= total;
  return sum;
}

std::vector<ckks::Ciphertext> aggregate_encrypted(
    const ckks::CkksContext& ctx, const std::vector<std::vector<ckks::Ciphertext>>& updates,
    std::span<const double> weights) {
  if (updates.empty()) throw Error(ErrorKind::kStructural, "aggregation over zero updates");
  const double total = weight_sum(weights, updates.size());
  const size_t chunks = updates.front().size();
  for (const auto& u : updates) {
    if (u.size() != chunks) throw Error(ErrorKind::kStructural, "clients sent different chunk counts");
  }
  std::vector<ckks::Ciphertext> out;
  out.reserve(chunks);
  for (size_t c = 0; c < chunks; ++c) {
    ckks::Ciphertext acc = updates.front()[c];
    for (size_t i = 1; i < updates.size(); ++i) acc = ckks::add(ctx, acc, updates[i][c]);
    out.push_back(ckks::mul_scalar_rescale(ctx, acc, 1.0 / total));
  }
  return out;
}

}  // namespace privfed
