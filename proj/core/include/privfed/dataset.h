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

#ifndef PRIVFED_DATASET_H_
#define PRIVFED_DATASET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace privfed {

inline constexpr size_t kFeatureCount = 10;

using Features = std::array<double, kFeatureCount>;

struct Record {
  Features x{};
  int label = 0;  // 0 = no event, 1 = event

  friend bool operator==(const Record&, const Record&) = default;
};

struct CohortDataset {
  std::vector<std::string> feature_names;
  std::vector<Record> rows;

  size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  size_t count_label(int label) const;

  friend bool operator==(const CohortDataset&, const CohortDataset&) = default;
};

// age, gender, diabetes_e10_e14, dyslipidemia_e78, atc_a10, atc_c09, atc_c10,
// then three filler comorbidity flags.
const std::vector<std::string>& default_feature_names();

struct SiteSpec {
  std::string name;
  int64_t n_negative = 0;
  int64_t n_positive = 0;
};

// County-level class counts of the reference cohort.
std::vector<SiteSpec> reference_sites();

// Rounds each class count of `site` by `scale_factor` (half away from zero).
SiteSpec scale_site(const SiteSpec& site, double scale_factor);

struct GeneratorSpec {
  std::vector<SiteSpec> sites = reference_sites();
  Features coefficients{};
  double intercept = 0.0;
  // Bernoulli prevalence of feature slots 1..9 (slot 0 is age).
  std::array<double, kFeatureCount - 1> prevalence{};
  double age_clip = 3.0;
  uint64_t seed = 7;
  double scale_factor = 1.0;
};

GeneratorSpec default_generator_spec();

struct SiteDataset {
  std::string site;
  CohortDataset data;
};

// Every site is generated from its own derived stream, so a single site can
// be reproduced without generating the others.
CohortDataset generate_site(const GeneratorSpec& spec, size_t site_index);
std::vector<SiteDataset> generate_cohort(const GeneratorSpec& spec);

CohortDataset concat(const std::vector<const CohortDataset*>& parts);

struct Split {
  CohortDataset train;
  CohortDataset valid;  // test fold for k-fold splits
};

// Stratified by label. Each class contributes round((1 - train_frac) * n_c)
// rows to validation, which must leave at least one row on both sides.
Split split_train_valid(const CohortDataset& ds, double train_frac, uint64_t seed);

// Stratified k-fold; fold sizes differ by at most one.
std::vector<Split> kfold_split(const CohortDataset& ds, size_t k, uint64_t seed);

CohortDataset read_csv(const std::filesystem::path& path);
void write_csv(const CohortDataset& ds, const std::filesystem::path& path);

}  // namespace privfed

#endif  // PRIVFED_DATASET_H_
