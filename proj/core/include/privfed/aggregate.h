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

#ifndef PRIVFED_AGGREGATE_H_
#define PRIVFED_AGGREGATE_H_

#include <span>
#include <vector>

#include "privfed/ckks/ckks.h"
#include "privfed/params.h"

namespace privfed {

// (sum_i updates_i) / (sum_i weights_i). Updates are expected to be
// pre-scaled by their weights when the weights are not all one.
FlatVector aggregate_plain(const std::vector<FlatVector>& updates, std::span<const double> weights);

// Same aggregate under encryption: ciphertext additions per chunk, then a
// single plaintext multiplication by 1 / sum(weights) with one rescale.
std::vector<ckks::Ciphertext> aggregate_encrypted(
    const ckks::CkksContext& ctx, const std::vector<std::vector<ckks::Ciphertext>>& updates,
    std::span<const double> weights);

}  // namespace privfed

#endif  // PRIVFED_AGGREGATE_H_
