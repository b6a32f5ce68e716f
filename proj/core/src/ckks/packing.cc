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

#include "privfed/ckks/packing.h"

#include <algorithm>

#include "privfed/error.h"

namespace privfed::ckks {
namespace {

void split_range(std::vector<Segment>& out, size_t offset, size_t length, size_t slot_count) {
  for (size_t done = 0; done < length; done += slot_count) {
    out.push_back({offset + done, std::min(slot_count, length - done)});
  }
}

}  // namespace

std::string_view to_string(Packing packing) {
  return packing == Packing::kFlat ? "flat" : "per_tensor";
}

Packing parse_packing(std::string_view name) {
  if (name == "flat") return Packing::kFlat;
  if (name == "per_tensor") return Packing::kPerTensor;
  throw Error(ErrorKind::kConfiguration, "unknown packing '" + std::string(name) + "'");
}

std::vector<Segment> packing_plan(const LayoutManifest& manifest, Packing packing, size_t slot_count) {
  if (slot_count == 0) throw Error(ErrorKind::kConfiguration, "slot_count must be positive");
  std::vector<Segment> plan;
  if (packing == Packing::kFlat) {
    split_range(plan, 0, manifest.total_length(), slot_count);
  } else {
    for (const auto& e : manifest.entries()) split_range(plan, e.offset, shape_size(e.shape), slot_count);
  }
  return plan;
}

std::vector<std::vector<double>> pack_update(std::span<const double> flat, size_t slot_count) {
  if (slot_count == 0) throw Error(ErrorKind::kConfiguration, "slot_count must be positive");
  std::vector<std::vector<double>> chunks;
  for (size_t begin = 0; begin < flat.size(); begin += slot_count) {
    const size_t end = std::min(flat.size(), begin + slot_count);
    chunks.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(begin),
                        flat.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return chunks;
}

FlatVector unpack_update(const std::vector<std::vector<double>>& decoded,
                         const LayoutManifest& manifest, size_t slot_count) {
  const auto plan = packing_plan(manifest, Packing::kFlat, slot_count);
  if (decoded.size() != plan.size()) {
    throw Error(ErrorKind::kStructural, "chunk count does not match the manifest length");
  }
  FlatVector out(manifest.total_length());
  for (size_t c = 0; c < plan.size(); ++c) {
    if (decoded[c].size() < plan[c].length) {
      throw Error(ErrorKind::kStructural, "decoded chunk shorter than its segment");
    }
    std::copy_n(decoded[c].begin(), plan[c].length, out.begin() + static_cast<std::ptrdiff_t>(plan[c].offset));
  }
  return out;
}

std::vector<Ciphertext> encrypt_update(const CkksContext& ctx, std::span<const double> flat,
                                       const LayoutManifest& manifest, Packing packing,
                                       const PublicKey& pk, Rng& rng) {
  if (flat.size() != manifest.total_length()) {
    throw Error(ErrorKind::kStructural, "update length does not match the manifest");
  }
  std::vector<Ciphertext> out;
  for (const auto& seg : packing_plan(manifest, packing, ctx.slot_count())) {
    const PlainPoly pt = encode(ctx, flat.subspan(seg.offset, seg.length), ctx.params().scale());
    out.push_back(encrypt(ctx, pt, pk, rng));
  }
  return out;
}

FlatVector decrypt_update(const CkksContext& ctx, std::span<const Ciphertext> chunks,
                          const LayoutManifest& manifest, Packing packing, const SecretKey& sk) {
  const auto plan = packing_plan(manifest, packing, ctx.slot_count());
  if (chunks.size() != plan.size()) {
    throw Error(ErrorKind::kStructural, "ciphertext count does not match the packing plan");
  }
  FlatVector out(manifest.total_length());
  for (size_t c = 0; c < plan.size(); ++c) {
    const auto slots = decode(ctx, decrypt(ctx, chunks[c], sk));
    std::copy_n(slots.begin(), plan[c].length, out.begin() + static_cast<std::ptrdiff_t>(plan[c].offset));
  }
  return out;
}

}  // namespace privfed::ckks
