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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "privfed/dataset.h"
#include "privfed/error.h"

namespace privfed {
namespace {

namespace fs = std::filesystem;

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

// Multiset of rows keyed by their exact bytes.
std::map<std::pair<Features, int>, int> multiset(const std::vector<Record>& rows) {
  std::map<std::pair<Features, int>, int> m;
  for (const auto& r : rows) m[{r.x, r.label}]++;
  return m;
}

CohortDataset synthetic(size_t n_neg, size_t n_pos, uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d;
  CohortDataset ds;
  ds.feature_names = default_feature_names();
  for (size_t i = 0; i < n_neg + n_pos; ++i) {
    Record r;
    for (double& v : r.x) v = d(g);
    r.label = i < n_pos ? 1 : 0;
    ds.rows.push_back(r);
  }
  std::shuffle(ds.rows.begin(), ds.rows.end(), g);
  return ds;
}

TEST(Sites, ReferenceCounts) {
  const auto sites = reference_sites();
  ASSERT_EQ(sites.size(), 4u);
  EXPECT_EQ(sites[2].name, "Stockholm");
  EXPECT_EQ(sites[2].n_negative, 391954);
  EXPECT_EQ(sites[2].n_positive, 26046);
  int64_t total = 0;
  for (const auto& s : sites) total += s.n_negative + s.n_positive;
  EXPECT_EQ(total, 660427);
}

TEST(Sites, Scaling) {
  const SiteSpec s = scale_site(reference_sites()[2], 0.01);
  EXPECT_EQ(s.n_negative, 3920);
  EXPECT_EQ(s.n_positive, 260);
}

TEST(Generate, ExactScaledCountsAndDeterminism) {
  GeneratorSpec spec = default_generator_spec();
  spec.scale_factor = 0.01;
  const auto a = generate_cohort(spec);
  const auto b = generate_cohort(spec);
  ASSERT_EQ(a.size(), 4u);
  for (size_t i = 0; i < a.size(); ++i) {
    const SiteSpec want = scale_site(spec.sites[i], 0.01);
    EXPECT_EQ(static_cast<int64_t>(a[i].data.count_label(0)), want.n_negative);
    EXPECT_EQ(static_cast<int64_t>(a[i].data.count_label(1)), want.n_positive);
    EXPECT_EQ(a[i].data, b[i].data);
    for (const auto& r : a[i].data.rows) {
      EXPECT_LE(std::abs(r.x[0]), spec.age_clip);
      for (size_t j = 1; j < kFeatureCount; ++j) EXPECT_TRUE(r.x[j] == 0.0 || r.x[j] == 1.0);
    }
  }
  spec.seed += 1;
  EXPECT_NE(generate_cohort(spec)[0].data, a[0].data);
}

TEST(Generate, TooSmallIsConfigurationError) {
  GeneratorSpec spec = default_generator_spec();
  spec.scale_factor = 0.0001;  // fewer than 10 positives per site
  EXPECT_EQ(kind_of([&] { generate_site(spec, 0); }), ErrorKind::kConfiguration);
}

TEST(Generate, InfeasibleCountsAreConfigurationError) {
  GeneratorSpec spec = default_generator_spec();
  spec.sites = {{"X", 10, 5000}};
  spec.intercept = -30.0;  // positives essentially never drawn
  EXPECT_EQ(kind_of([&] { generate_site(spec, 0); }), ErrorKind::kConfiguration);
}

TEST(Split, StratifiedArithmetic) {
  const CohortDataset ds = synthetic(90, 10, 1);
  const Split s = split_train_valid(ds, 0.8, 7);
  EXPECT_EQ(s.train.size(), 80u);
  EXPECT_EQ(s.valid.size(), 20u);
  EXPECT_EQ(s.train.count_label(0), 72u);
  EXPECT_EQ(s.train.count_label(1), 8u);
  EXPECT_EQ(s.valid.count_label(0), 18u);
  EXPECT_EQ(s.valid.count_label(1), 2u);
}

TEST(Split, ExtremeFractionIsSplitError) {
  const CohortDataset ds = synthetic(5, 5, 2);
  EXPECT_EQ(kind_of([&] { split_train_valid(ds, 0.999, 1); }), ErrorKind::kSplit);
  EXPECT_EQ(kind_of([&] { split_train_valid(synthetic(10, 1, 3), 0.5, 1); }), ErrorKind::kSplit);
}

TEST(Split, PropertiesOnRandomCases) {
  std::mt19937_64 g(11);
  std::uniform_int_distribution<size_t> count(2, 60);
  std::uniform_real_distribution<double> frac(0.3, 0.9);
  size_t checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const CohortDataset ds = synthetic(count(g), count(g), 1000 + t);
    const double f = frac(g);
    Split s;
    try {
      s = split_train_valid(ds, f, t);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kSplit);
      continue;
    }
    ++checked;
    auto all = multiset(ds.rows), tr = multiset(s.train.rows), va = multiset(s.valid.rows);
    for (const auto& [k, v] : tr) EXPECT_EQ(va.count(k), 0u);  // disjoint
    auto uni = tr;
    for (const auto& [k, v] : va) uni[k] += v;
    EXPECT_EQ(uni, all);  // exhaustive
    for (int c : {0, 1}) {
      EXPECT_GE(s.valid.count_label(c), 1u);
      EXPECT_GE(s.train.count_label(c), 1u);
    }
    const Split again = split_train_valid(ds, f, t);
    EXPECT_EQ(again.train, s.train);  // deterministic
  }
  EXPECT_GT(checked, 900u);
}

TEST(KFold, TenFoldsOfHundred) {
  const CohortDataset ds = synthetic(900, 100, 4);
  const auto folds = kfold_split(ds, 10, 3);
  ASSERT_EQ(folds.size(), 10u);
  std::map<std::pair<Features, int>, int> seen;
  for (const auto& f : folds) {
    EXPECT_EQ(f.valid.size(), 100u);
    EXPECT_EQ(f.train.size(), 900u);
    EXPECT_EQ(f.valid.count_label(1), 10u);  // stratified
    for (const auto& [k, v] : multiset(f.valid.rows)) seen[k] += v;
    auto tr = multiset(f.train.rows);
    for (const auto& [k, v] : multiset(f.valid.rows)) EXPECT_EQ(tr.count(k), 0u);
  }
  EXPECT_EQ(seen, multiset(ds.rows));
}

TEST(KFold, TwoFoldSymmetry) {
  const CohortDataset ds = synthetic(40, 20, 5);
  const auto folds = kfold_split(ds, 2, 9);
  EXPECT_EQ(multiset(folds[0].train.rows), multiset(folds[1].valid.rows));
  EXPECT_EQ(multiset(folds[1].train.rows), multiset(folds[0].valid.rows));
}

TEST(KFold, Errors) {
  EXPECT_EQ(kind_of([] { kfold_split(synthetic(50, 5, 6), 10, 1); }), ErrorKind::kSplit);
  EXPECT_EQ(kind_of([] { kfold_split(synthetic(50, 50, 6), 1, 1); }), ErrorKind::kSplit);
}

class CsvTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("privfed_csv_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }
  std::string header() const {
    std::string h;
    for (const auto& n : default_feature_names()) h += n + ",";
    return h + "label\n";
  }
  fs::path dir_;
};

TEST_F(CsvTest, RoundtripIsLossless) {
  CohortDataset ds = synthetic(30, 7, 8);
  ds.rows[0].x[3] = 1e-310;
  ds.rows[1].x[4] = -0.1;
  write_csv(ds, dir_ / "a.csv");
  EXPECT_EQ(read_csv(dir_ / "a.csv"), ds);
}

TEST_F(CsvTest, BadLabelNamesRow) {
  std::string text = header();
  for (int r = 1; r <= 6; ++r) text += "1,0,0,0,0,0,0,0,0,0," + std::string(r == 5 ? "2" : "1") + "\n";
  try {
    read_csv(write("bad.csv", text));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("row 5"), std::string::npos) << e.what();
  }
}

TEST_F(CsvTest, OtherParseErrors) {
  EXPECT_EQ(kind_of([&] { read_csv(write("empty.csv", "")); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([&] { read_csv(write("cols.csv", header() + "1,2,3\n")); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([&] { read_csv(write("nan.csv", header() + "x,0,0,0,0,0,0,0,0,0,1\n")); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([&] { read_csv(write("hdr.csv", "a,b\n")); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([&] { read_csv(dir_ / "missing.csv"); }), ErrorKind::kIo);
}

}  // namespace
}  // namespace privfed
