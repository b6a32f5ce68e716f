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

#include "privfed/params.h"

#include <cmath>
#include <set>

#include "privfed/error.h"

namespace privfed {

size_t shape_size(std::span<const size_t> shape) {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

ParamSet::ParamSet(std::vector<TensorEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string_view> names;
  for (const auto& e : entries_) {
    if (e.name.empty()) throw Error(ErrorKind::kStructural, "tensor with empty name");
    if (!names.insert(e.name).second) {
      throw Error(ErrorKind::kStructural, "duplicate tensor name '" + e.name + "'");
    }
    if (e.shape.empty()) throw Error(ErrorKind::kStructural, "tensor '" + e.name + "' has no shape");
    for (size_t d : e.shape) {
      if (d == 0) throw Error(ErrorKind::kStructural, "tensor '" + e.name + "' has a zero dimension");
    }
    if (shape_size(e.shape) != e.values.size()) {
      throw Error(ErrorKind::kStructural, "tensor '" + e.name + "' value count does not match its shape");
    }
  }
}

const TensorEntry& ParamSet::at(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e;
  }
  throw Error(ErrorKind::kStructural, "no tensor named '" + std::string(name) + "'");
}

size_t ParamSet::size() const {
  size_t n = 0;
  for (const auto& e : entries_) n += e.values.size();
  return n;
}

bool ParamSet::same_layout(const ParamSet& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name != other.entries_[i].name ||
        entries_[i].shape != other.entries_[i].shape) {
      return false;
    }
  }
  return true;
}

LayoutManifest::LayoutManifest(std::vector<ManifestEntry> entries) : entries_(std::move(entries)) {
  size_t offset = 0;
  for (const auto& e : entries_) {
    if (e.offset != offset) {
      throw Error(ErrorKind::kStructural, "manifest offsets are not contiguous at '" + e.name + "'");
    }
    offset += shape_size(e.shape);
  }
  total_ = offset;
}

LayoutManifest LayoutManifest::of(const ParamSet& params) {
  std::vector<ManifestEntry> out;
  out.reserve(params.entries().size());
  size_t offset = 0;
  for (const auto& e : params.entries()) {
    out.push_back({e.name, e.shape, offset});
    offset += e.values.size();
  }
  return LayoutManifest(std::move(out));
}

bool LayoutManifest::matches(const ParamSet& params) const {
  const auto& pe = params.entries();
  if (pe.size() != entries_.size()) return false;
  for (size_t i = 0; i < pe.size(); ++i) {
    if (pe[i].name != entries_[i].name || pe[i].shape != entries_[i].shape) return false;
  }
  return true;
}

Flattened flatten(const ParamSet& params) {
  Flattened out;
  out.values.reserve(params.size());
  for (const auto& e : params.entries()) {
    out.values.insert(out.values.end(), e.values.begin(), e.values.end());
  }
  out.manifest = LayoutManifest::of(params);
  return out;
}

ParamSet unflatten(std::span<const double> flat, const LayoutManifest& manifest) {
  if (flat.size() != manifest.total_length()) {
    throw Error(ErrorKind::kStructural,
                "flat length " + std::to_string(flat.size()) + " does not match manifest length " +
                    std::to_string(manifest.total_length()));
  }
  std::vector<TensorEntry> entries;
  entries.reserve(manifest.entries().size());
  for (const auto& m : manifest.entries()) {
    auto first = flat.begin() + static_cast<std::ptrdiff_t>(m.offset);
    auto last = first + static_cast<std::ptrdiff_t>(shape_size(m.shape));
    entries.push_back({m.name, m.shape, std::vector<double>(first, last)});
  }
  return ParamSet(std::move(entries));
}

ParamSet compute_delta(const ParamSet& after, const ParamSet& before) {
  if (!after.same_layout(before)) {
    throw Error(ErrorKind::kStructural, "compute_delta on parameter sets with different layouts");
  }
  std::vector<TensorEntry> out = after.entries();
  for (size_t i = 0; i < out.size(); ++i) {
    const auto& b = before.entries()[i].values;
    for (size_t j = 0; j < b.size(); ++j) out[i].values[j] -= b[j];
  }
  return ParamSet(std::move(out));
}

ParamSet apply_update(const ParamSet& base, std::span<const double> delta,
                      const LayoutManifest& manifest) {
  if (!manifest.matches(base)) {
    throw Error(ErrorKind::kStructural, "manifest does not match the base parameter layout");
  }
  if (delta.size() != manifest.total_length()) {
    throw Error(ErrorKind::kStructural, "update length does not match manifest");
  }
  std::vector<TensorEntry> out = base.entries();
  for (size_t i = 0; i < out.size(); ++i) {
    const size_t offset = manifest.entries()[i].offset;
    for (size_t j = 0; j < out[i].values.size(); ++j) out[i].values[j] += delta[offset + j];
  }
  return ParamSet(std::move(out));
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace privfed
