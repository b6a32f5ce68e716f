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

#ifndef PRIVFED_CKKS_PACKING_H_
#define PRIVFED_CKKS_PACKING_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "privfed/ckks/ckks.h"
#include "privfed/params.h"

namespace privfed::ckks {

// kFlat packs the whole flat update into consecutive slot_count chunks.
// kPerTensor packs each manifest entry separately (one or more ciphertexts
// per tensor), the way layer-wise encrypted aggregation ships updates.
enum class Packing { kFlat, kPerTensor };

std::string_view to_string(Packing packing);
Packing parse_packing(std::string_view name);

struct Segment {
  size_t offset = 0;
  size_t length = 0;
};

// Slot-sized pieces of the flat vector, one per ciphertext.
std::vector<Segment> packing_plan(const LayoutManifest& manifest, Packing packing, size_t slot_count);

// Flat chunks of at most slot_count values; ceil(n / slot_count) of them.
std::vector<std::vector<double>> pack_update(std::span<const double> flat, size_t slot_count);

// Inverse of pack_update given decoded slots; padding slots are dropped.
FlatVector unpack_update(const std::vector<std::vector<double>>& decoded,
                         const LayoutManifest& manifest, size_t slot_count);

std::vector<Ciphertext> encrypt_update(const CkksContext& ctx, std::span<const double> flat,
                                       const LayoutManifest& manifest, Packing packing,
                                       const PublicKey& pk, Rng& rng);

FlatVector decrypt_update(const CkksContext& ctx, std::span<const Ciphertext> chunks,
                          const LayoutManifest& manifest, Packing packing, const SecretKey& sk);

}  // namespace privfed::ckks

#endif  // PRIVFED_CKKS_PACKING_H_
