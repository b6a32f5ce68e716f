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

#ifndef PRIVFED_PARAMS_H_
#define PRIVFED_PARAMS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace privfed {

// Flattened model parameters; the unit of federation traffic.
using FlatVector = std::vector<double>;

struct TensorEntry {
  std::string name;
  std::vector<size_t> shape;
  std::vector<double> values;  // row-major

  friend bool operator==(const TensorEntry&, const TensorEntry&) = default;
};

size_t shape_size(std::span<const size_t> shape);

// Named tensors in declaration order. Validated on construction: unique
// names, positive dimensions, and value counts that match the shapes.
class ParamSet {
 public:
  ParamSet() = default;
  explicit ParamSet(std::vector<TensorEntry> entries);

  const std::vector<TensorEntry>& entries() const { return entries_; }
  const TensorEntry& at(std::string_view name) const;

  // Total scalar count across all entries.
  size_t size() const;

  // Same names and shapes in the same order.
  bool same_layout(const ParamSet& other) const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::vector<TensorEntry> entries_;
};

struct ManifestEntry {
  std::string name;
  std::vector<size_t> shape;
  size_t offset = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// Where each tensor lives inside a FlatVector.
class LayoutManifest {
 public:
  LayoutManifest() = default;
  // Offsets must be contiguous from zero.
  explicit LayoutManifest(std::vector<ManifestEntry> entries);

  static LayoutManifest of(const ParamSet& params);

  const std::vector<ManifestEntry>& entries() const { return entries_; }
  size_t total_length() const { return total_; }
  bool matches(const ParamSet& params) const;

  friend bool operator==(const LayoutManifest&, const LayoutManifest&) = default;

 private:
  std::vector<ManifestEntry> entries_;
  size_t total_ = 0;
};

struct Flattened {
  FlatVector values;
  LayoutManifest manifest;
};

Flattened flatten(const ParamSet& params);
ParamSet unflatten(std::span<const double> flat, const LayoutManifest& manifest);

// after - before, elementwise.
ParamSet compute_delta(const ParamSet& after, const ParamSet& before);

// base + unflatten(delta), elementwise.
ParamSet apply_update(const ParamSet& base, std::span<const double> delta,
                      const LayoutManifest& manifest);

bool all_finite(std::span<const double> values);

}  // namespace privfed

#endif  // PRIVFED_PARAMS_H_
