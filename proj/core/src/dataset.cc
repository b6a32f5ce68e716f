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

#include "privfed/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "privfed/error.h"
#include "privfed/rng.h"

namespace privfed {
namespace {

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

std::vector<size_t> class_indices(const CohortDataset& ds, int label) {
  std::vector<size_t> idx;
  for (size_t i = 0; i < ds.rows.size(); ++i) {
    if (ds.rows[i].label == label) idx.push_back(i);
  }
  return idx;
}

CohortDataset select(const CohortDataset& ds, std::vector<size_t> idx) {
  std::sort(idx.begin(), idx.end());
  CohortDataset out;
  out.feature_names = ds.feature_names;
  out.rows.reserve(idx.size());
  for (size_t i : idx) out.rows.push_back(ds.rows[i]);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

size_t CohortDataset::count_label(int label) const {
  return static_cast<size_t>(
      std::count_if(rows.begin(), rows.end(), [label](const Record& r) { return r.label == label; }));
}

const std::vector<std::string>& default_feature_names() {
  static const std::vector<std::string> names = {
      "age",     "gender",  "diabetes_e10_e14", "dyslipidemia_e78", "atc_a10",
      "atc_c09", "atc_c10", "comorbidity_1",    "comorbidity_2",    "comorbidity_3"};
  return names;
}

std::vector<SiteSpec> reference_sites() {
  return {{"Ostergotland", 92630, 6518},
          {"Sodermanland", 63901, 4575},
          {"Stockholm", 391954, 26046},
          {"Uppsala", 69909, 4894}};
}

SiteSpec scale_site(const SiteSpec& site, double scale_factor) {
  return {site.name, std::llround(static_cast<double>(site.n_negative) * scale_factor),
          std::llround(static_cast<double>(site.n_positive) * scale_factor)};
}

GeneratorSpec default_generator_spec() {
  GeneratorSpec spec;
  // Calibrated with `privfed calibrate`; age and diabetes dominate.
  spec.coefficients = {0.62, 0.16, 0.45, 0.22, 0.20, 0.26, 0.18, 0.12, 0.09, 0.06};
  spec.intercept = -3.0;
  spec.prevalence = {0.50, 0.08, 0.15, 0.10, 0.20, 0.15, 0.12, 0.10, 0.08};
  return spec;
}

CohortDataset generate_site(const GeneratorSpec& spec, size_t site_index) {
  if (site_index >= spec.sites.size()) {
    throw Error(ErrorKind::kConfiguration, "site index out of range");
  }
  if (!(spec.scale_factor > 0.0 && spec.scale_factor <= 1.0)) {
    throw Error(ErrorKind::kConfiguration, "scale_factor must lie in (0, 1]");
  }
  const SiteSpec site = scale_site(spec.sites[site_index], spec.scale_factor);
  if (site.n_negative < 10 || site.n_positive < 10) {
    throw Error(ErrorKind::kConfiguration,
                "site '" + site.name + "' needs at least 10 rows per class after scaling");
  }
  for (double p : spec.prevalence) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kConfiguration, "prevalence outside [0, 1]");
  }

  Rng rng(derive_seed(spec.seed, {site_index}));
  std::normal_distribution<double> normal(0.0, 1.0);

  CohortDataset ds;
  ds.feature_names = default_feature_names();
  const auto target = static_cast<size_t>(site.n_negative + site.n_positive);
  ds.rows.reserve(target);
  int64_t need[2] = {site.n_negative, site.n_positive};
  const size_t max_draws = 2000 * target;
  size_t draws = 0;
  while (need[0] > 0 || need[1] > 0) {
    if (++draws > max_draws) {
      throw Error(ErrorKind::kConfiguration,
                  "class counts for site '" + site.name + "' are infeasible under the generator");
    }
    Record r;
    double age;
    do {
      age = normal(rng);
    } while (std::abs(age) > spec.age_clip);
    r.x[0] = age;
    for (size_t j = 1; j < kFeatureCount; ++j) {
      r.x[j] = uniform_open01(rng) < spec.prevalence[j - 1] ? 1.0 : 0.0;
    }
    double z = spec.intercept;
    for (size_t j = 0; j < kFeatureCount; ++j) z += spec.coefficients[j] * r.x[j];
    r.label = uniform_open01(rng) < sigmoid(z) ? 1 : 0;
    if (need[r.label] > 0) {
      --need[r.label];
      ds.rows.push_back(r);
    }
  }
  return ds;
}

std::vector<SiteDataset> generate_cohort(const GeneratorSpec& spec) {
  std::vector<SiteDataset> out;
  out.reserve(spec.sites.size());
  for (size_t i = 0; i < spec.sites.size(); ++i) {
    out.push_back({spec.sites[i].name, generate_site(spec, i)});
  }
  return out;
}

CohortDataset concat(const std::vector<const CohortDataset*>& parts) {
  CohortDataset out;
  for (const auto* p : parts) {
    if (out.feature_names.empty()) out.feature_names = p->feature_names;
    out.rows.insert(out.rows.end(), p->rows.begin(), p->rows.end());
  }
  return out;
}

Split split_train_valid(const CohortDataset& ds, double train_frac, uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw Error(ErrorKind::kSplit, "train_frac must lie in (0, 1)");
  }
  if (ds.empty()) throw Error(ErrorKind::kSplit, "cannot split an empty dataset");
  Rng rng(seed);
  std::vector<size_t> train_idx, valid_idx;
  for (int label : {0, 1}) {
    std::vector<size_t> idx = class_indices(ds, label);
    if (idx.size() < 2) {
      throw Error(ErrorKind::kSplit, "class " + std::to_string(label) + " has fewer than 2 rows");
    }
    const auto n_valid = static_cast<size_t>(
        std::llround((1.0 - train_frac) * static_cast<double>(idx.size())));
    if (n_valid == 0 || n_valid >= idx.size()) {
      throw Error(ErrorKind::kSplit, "class " + std::to_string(label) +
                                         " would leave an empty train or validation side");
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    valid_idx.insert(valid_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_valid));
    train_idx.insert(train_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_valid), idx.end());
  }
  return {select(ds, std::move(train_idx)), select(ds, std::move(valid_idx))};
}

std::vector<Split> kfold_split(const CohortDataset& ds, size_t k, uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::kSplit, "k-fold needs k >= 2");
  Rng rng(seed);
  std::vector<size_t> order;
  for (int label : {0, 1}) {
    std::vector<size_t> idx = class_indices(ds, label);
    if (idx.size() < k) {
      throw Error(ErrorKind::kSplit,
                  "class " + std::to_string(label) + " has fewer rows than folds");
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    order.insert(order.end(), idx.begin(), idx.end());
  }
  std::vector<std::vector<size_t>> folds(k);
  for (size_t pos = 0; pos < order.size(); ++pos) folds[pos % k].push_back(order[pos]);

  std::vector<Split> out;
  out.reserve(k);
  for (size_t f = 0; f < k; ++f) {
    std::vector<size_t> train;
    for (size_t g = 0; g < k; ++g) {
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    }
    out.push_back({select(ds, std::move(train)), select(ds, folds[f])});
  }
  return out;
}

CohortDataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kParse, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = split_commas(line);
  if (header.size() != kFeatureCount + 1) {
    throw Error(ErrorKind::kParse, path.string() + ": header must have " +
                                       std::to_string(kFeatureCount + 1) + " columns");
  }
  if (header.back() != "label") {
    throw Error(ErrorKind::kParse, path.string() + ": last header column must be 'label'");
  }
  CohortDataset ds;
  for (size_t j = 0; j < kFeatureCount; ++j) ds.feature_names.emplace_back(header[j]);

  size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::string where = path.string() + ": row " + std::to_string(row);
    auto cells = split_commas(line);
    if (cells.size() != kFeatureCount + 1) {
      throw Error(ErrorKind::kParse, where + ": expected " + std::to_string(kFeatureCount + 1) +
                                         " columns, got " + std::to_string(cells.size()));
    }
    Record r;
    for (size_t j = 0; j < kFeatureCount; ++j) {
      const auto cell = cells[j];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), r.x[j]);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(r.x[j])) {
        throw Error(ErrorKind::kParse, where + ": non-numeric value '" + std::string(cell) +
                                           "' in column '" + ds.feature_names[j] + "'");
      }
    }
    const auto label = cells.back();
    if (label == "0") {
      r.label = 0;
    } else if (label == "1") {
      r.label = 1;
    } else {
      throw Error(ErrorKind::kParse, where + ": label must be 0 or 1, got '" + std::string(label) + "'");
    }
    ds.rows.push_back(r);
  }
  return ds;
}

void write_csv(const CohortDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  const auto& names = ds.feature_names.empty() ? default_feature_names() : ds.feature_names;
  for (const auto& n : names) out << n << ',';
  out << "label\n";
  for (const auto& r : ds.rows) {
    for (double v : r.x) out << format_double(v) << ',';
    out << r.label << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace privfed
