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

#include <gtest/gtest.h>

#include "privfed/aggregate.h"
#include "privfed/ckks/packing.h"
#include "privfed/error.h"

namespace privfed {
namespace {

TEST(AggregatePlain, MeanOfTwo) {
  const std::vector<FlatVector> u = {{1, 3}, {3, 5}};
  EXPECT_EQ(aggregate_plain(u, std::vector<double>{1, 1}), (FlatVector{2, 4}));
}

TEST(AggregatePlain, SingleClientIdentity) {
  const std::vector<FlatVector> u = {{0.1, -2.5, 7.0}};
  EXPECT_EQ(aggregate_plain(u, std::vector<double>{1}), u[0]);
}

TEST(AggregatePlain, MatchesBruteForceMean) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> d;
  for (int t = 0; t < 20; ++t) {
    std::vector<FlatVector> u(4, FlatVector(66));
    for (auto& v : u) for (double& x : v) x = d(g);
    const FlatVector got = aggregate_plain(u, std::vector<double>(4, 1.0));
    for (size_t i = 0; i < 66; ++i) {
      const double want = (u[0][i] + u[1][i] + u[2][i] + u[3][i]) / 4.0;
      EXPECT_NEAR(got[i], want, 1e-12);
    }
  }
}

TEST(AggregatePlain, UnitWeightsGiveExactUnweightedMean) {
  // Sum-then-divide in client order, exactly as the mean is defined.
  const std::vector<FlatVector> u = {{0.1}, {0.2}, {0.7}};
  EXPECT_EQ(aggregate_plain(u, std::vector<double>(3, 1.0))[0], ((0.1 + 0.2) + 0.7) / 3.0);
}

TEST(AggregatePlain, DividesByWeightSum) {
  // Updates arrive pre-scaled by their weights.
  const std::vector<FlatVector> u = {{2.0 * 1.0}, {6.0 * 3.0}};
  EXPECT_DOUBLE_EQ(aggregate_plain(u, std::vector<double>{2, 6})[0], 20.0 / 8.0);
}

TEST(AggregatePlain, Errors) {
  auto kind = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  EXPECT_EQ(kind([] { aggregate_plain({}, std::vector<double>{}); }), ErrorKind::kStructural);
  EXPECT_EQ(kind([] { aggregate_plain({{1, 2}, {1}}, std::vector<double>{1, 1}); }), ErrorKind::kStructural);
  EXPECT_EQ(kind([] { aggregate_plain({{1, 2}}, std::vector<double>{1, 1}); }), ErrorKind::kStructural);
}

struct He {
  He() : ctx(ckks::make_context(ckks::CkksParams::reduced())), rng(3), keys(ckks::keygen(*ctx, rng)) {}
  ckks::ContextPtr ctx;
  Rng rng;
  ckks::KeyPair keys;
};

TEST(AggregateEncrypted, SingleClientScalarOne) {
  He he;
  const LayoutManifest m({{"w", {3}, 0}});
  const FlatVector v = {0.5, -0.25, 0.125};
  const auto cts = ckks::encrypt_update(*he.ctx, v, m, ckks::Packing::kFlat, he.keys.public_key, he.rng);
  const auto agg = aggregate_encrypted(*he.ctx, {cts}, std::vector<double>{1});
  const FlatVector out = ckks::decrypt_update(*he.ctx, agg, m, ckks::Packing::kFlat, he.keys.secret);
  for (size_t i = 0; i < 3; ++i) EXPECT_NEAR(out[i], v[i], 1e-3);
}

TEST(AggregateEncrypted, FourClientsOfFours) {
  He he;
  const LayoutManifest m({{"w", {100}, 0}});
  const FlatVector v(100, 4.0);
  std::vector<std::vector<ckks::Ciphertext>> all;
  for (int c = 0; c < 4; ++c) {
    all.push_back(ckks::encrypt_update(*he.ctx, v, m, ckks::Packing::kFlat, he.keys.public_key, he.rng));
  }
  const auto agg = aggregate_encrypted(*he.ctx, all, std::vector<double>(4, 1.0));
  for (double x : ckks::decrypt_update(*he.ctx, agg, m, ckks::Packing::kFlat, he.keys.secret)) {
    EXPECT_NEAR(x, 4.0, 1e-3);
  }
}

TEST(AggregateEncrypted, MatchesPlainAggregation) {
  He he;
  const LayoutManifest m({{"a", {5, 10}, 0}, {"b", {16}, 50}});
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> d(-1, 1);
  for (auto packing : {ckks::Packing::kFlat, ckks::Packing::kPerTensor}) {
    std::vector<FlatVector> plain;
    std::vector<std::vector<ckks::Ciphertext>> enc;
    for (int c = 0; c < 4; ++c) {
      FlatVector v(66);
      for (double& x : v) x = d(g);
      enc.push_back(ckks::encrypt_update(*he.ctx, v, m, packing, he.keys.public_key, he.rng));
      plain.push_back(ckks::decrypt_update(*he.ctx, enc.back(), m, packing, he.keys.secret));
    }
    const FlatVector want = aggregate_plain(plain, std::vector<double>(4, 1.0));
    const FlatVector got = ckks::decrypt_update(
        *he.ctx, aggregate_encrypted(*he.ctx, enc, std::vector<double>(4, 1.0)), m, packing, he.keys.secret);
    for (size_t i = 0; i < 66; ++i) EXPECT_NEAR(got[i], want[i], 1e-3);
  }
}

TEST(AggregateEncrypted, ChunkShapeMismatchIsStructural) {
  He he;
  const LayoutManifest one({{"w", {10}, 0}}), two({{"w", {600}, 0}});
  auto a = ckks::encrypt_update(*he.ctx, FlatVector(10, 0.1), one, ckks::Packing::kFlat, he.keys.public_key, he.rng);
  auto b = ckks::encrypt_update(*he.ctx, FlatVector(600, 0.1), two, ckks::Packing::kFlat, he.keys.public_key, he.rng);
  try {
    aggregate_encrypted(*he.ctx, {a, b}, std::vector<double>{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kStructural);
  }
}

TEST(AggregateEncrypted, ExhaustedInputsAreRejected) {
  He he;
  const LayoutManifest m({{"w", {4}, 0}});
  auto cts = ckks::encrypt_update(*he.ctx, FlatVector(4, 0.1), m, ckks::Packing::kFlat, he.keys.public_key, he.rng);
  const auto once = aggregate_encrypted(*he.ctx, {cts}, std::vector<double>{1});
  try {
    aggregate_encrypted(*he.ctx, {once}, std::vector<double>{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDepthExhausted);
  }
}

}  // namespace
}  // namespace privfed
