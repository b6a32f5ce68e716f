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
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "privfed/error.h"
#include "privfed/laplace.h"
#include "privfed/svt.h"

namespace privfed {
namespace {

std::vector<double> ref_svt(const std::vector<double>& delta, size_t steps, double fraction, double eps,
                            double noise_var, double gamma, double tau, std::mt19937_64& g) {
  return oracle::svt(delta, steps, fraction, eps, noise_var, gamma, tau, g);
}

// --- noise_scale ---------------------------------------------------------------

TEST(NoiseScale, Examples) {
  EXPECT_DOUBLE_EQ(noise_scale(0.01, 1.0), 0.02);
  EXPECT_DOUBLE_EQ(noise_scale(0.001, 1e4), 2e-7);
  for (double eps : {0.1, 1.0, 7.5}) EXPECT_DOUBLE_EQ(noise_scale(eps / 2.0, eps), 1.0);
}

TEST(NoiseScale, NonPositiveIsInputError) {
  for (auto [g, e] : {std::pair{0.0, 1.0}, std::pair{1.0, 0.0}, std::pair{-1.0, 1.0}}) {
    try {
      noise_scale(g, e);
      FAIL();
    } catch (const Error& err) {
      EXPECT_EQ(err.kind(), ErrorKind::kInput);
    }
  }
}

// --- Laplace -------------------------------------------------------------------

TEST(Laplace, MedianAtZero) { EXPECT_EQ(laplace_from_uniform(0.0, 3.0), 0.0); }

TEST(Laplace, InverseCdfFormula) {
  for (double u : {-0.49, -0.25, -0.01, 0.01, 0.25, 0.49}) {
    const double x = laplace_from_uniform(u, 2.0);
    // CDF of Laplace(0, 2) at x must equal u + 0.5.
    const double cdf = x < 0 ? 0.5 * std::exp(x / 2.0) : 1.0 - 0.5 * std::exp(-x / 2.0);
    EXPECT_NEAR(cdf, u + 0.5, 1e-14);
  }
}

TEST(Laplace, SamplerRejectsNonPositiveScale) {
  Rng rng(1);
  EXPECT_THROW(LaplaceSampler(rng, 0.0), Error);
}

TEST(Laplace, MomentsMonteCarlo) {
  Rng rng(2024);
  LaplaceSampler s(rng, 1.0);
  const int n = 1000000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_LT(std::abs(mean), 0.01);
  EXPECT_NEAR(var, 2.0, 0.04);
}

TEST(Laplace, ChiSquareGoodnessOfFit) {
  // 20 equiprobable bins from the Laplace(0, 1) quantile function.
  std::vector<double> edges;
  for (int k = 1; k < 20; ++k) {
    const double p = k / 20.0;
    edges.push_back(p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p)));
  }
  Rng rng(99);
  const int n = 1000000;
  std::vector<int> counts(20, 0);
  for (int i = 0; i < n; ++i) {
    const double x = laplace_sample(rng, 1.0);
    counts[std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()]++;
  }
  double chi2 = 0.0;
  const double expected = n / 20.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 43.82);  // chi-square(19) critical value at alpha = 0.001
}

// --- SVT -----------------------------------------------------------------------

SvtConfig reference_nn() { return {0.9, 1.0, 2.0, 0.01, 1e-4}; }

TEST(Svt, MatchesReferenceBitwise) {
  std::mt19937_64 data(5);
  std::normal_distribution<double> d(0.0, 0.05);
  std::uniform_int_distribution<size_t> len(1, 200), st(1, 40);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> delta(len(data));
    for (double& v : delta) v = d(data);
    const size_t steps = st(data);
    const SvtConfig cfg{0.5 + 0.5 * (t % 5) / 4.0, 0.5 + t % 3, 0.01 + 0.5 * (t % 4), 0.001 * (1 + t % 7),
                        (t % 2) ? 1e-4 : -1e-3};
    Rng rng(1000 + t);
    std::mt19937_64 ref_rng(1000 + t);
    const FlatVector got = svt_filter(delta, steps, cfg, rng);
    const auto want =
        ref_svt(delta, steps, cfg.fraction, cfg.epsilon, cfg.noise_var, cfg.gamma, cfg.tau, ref_rng);
    ASSERT_EQ(got.size(), want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(std::bit_cast<uint64_t>(got[i]), std::bit_cast<uint64_t>(want[i])) << "case " << t << " i " << i;
    }
  }
}

TEST(Svt, OutputBoundAndReleaseCap) {
  std::mt19937_64 data(6);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> delta(66);
    for (double& v : delta) v = d(data);
    SvtConfig cfg = reference_nn();
    cfg.fraction = 0.1 + 0.9 * (t % 10) / 9.0;
    cfg.tau = -1.0;  // everything passes: the cap binds
    const size_t steps = 1 + t % 25;
    Rng rng(t);
    const FlatVector y = svt_filter(delta, steps, cfg, rng);
    size_t nonzero = 0;
    for (double v : y) {
      EXPECT_LE(std::abs(v), cfg.gamma * steps + 1e-15);
      nonzero += v != 0.0;
    }
    EXPECT_LE(nonzero, static_cast<size_t>(std::ceil(cfg.fraction * 66)));
  }
}

TEST(Svt, NoNoiseLimit) {
  const std::vector<double> delta = {0.5, -0.002, 0.0004, -3.0, 0.0};
  const SvtConfig cfg{1.0, 1e12, 1e-30, 0.01, -std::numeric_limits<double>::infinity()};
  Rng rng(1);
  const size_t steps = 10;
  const FlatVector y = svt_filter(delta, steps, cfg, rng);
  for (size_t i = 0; i < delta.size(); ++i) {
    const double want = std::clamp(delta[i] / steps, -0.01, 0.01) * steps;
    EXPECT_NEAR(y[i], want, 1e-9);
  }
}

TEST(Svt, HighThresholdReleasesNothing) {
  const std::vector<double> delta(66, 0.0);
  const SvtConfig cfg{0.9, 1e6, 2.0, 0.01, 10.0};
  for (uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    for (double v : svt_filter(delta, 5, cfg, rng)) EXPECT_EQ(v, 0.0);
  }
}

TEST(Svt, ZeroStepsIsInputError) {
  Rng rng(1);
  try {
    svt_filter(std::vector<double>{1.0}, 0, reference_nn(), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInput);
  }
}

TEST(Svt, NonFiniteDeltaIsInputError) {
  Rng rng(1);
  EXPECT_THROW(svt_filter(std::vector<double>{std::nan("")}, 1, reference_nn(), rng), Error);
}

TEST(Svt, InvalidConfigRejected) {
  Rng rng(1);
  SvtConfig cfg = reference_nn();
  cfg.fraction = 1.5;
  EXPECT_THROW(svt_filter(std::vector<double>{1.0}, 1, cfg, rng), Error);
}

TEST(Svt, Deterministic) {
  const std::vector<double> delta = {0.1, -0.2, 0.3, 0.05, -0.01};
  Rng a(17), b(17);
  EXPECT_EQ(svt_filter(delta, 3, reference_nn(), a), svt_filter(delta, 3, reference_nn(), b));
}

TEST(Svt, PerturbationNondecreasingInNoiseVar) {
  // Use a large clip bound so that the value noise is visible before the
  // re-clip, and tau far below zero so every component is accepted.
  const std::vector<double> delta = {0.3, -0.2, 0.1, 0.0, 0.25, -0.4, 0.05, 0.15};
  double prev = 0.0;
  for (double nv : {0.001, 0.01, 0.1, 1.0}) {
    SvtConfig cfg{1.0, 1.0, nv, 5.0, -1e9};
    double total = 0.0;
    size_t count = 0;
    for (uint64_t s = 0; s < 400; ++s) {
      Rng rng(s);
      const FlatVector y = svt_filter(delta, 1, cfg, rng);
      for (size_t i = 0; i < y.size(); ++i) {
        total += std::abs(y[i] - delta[i]);
        ++count;
      }
    }
    const double mean = total / count;
    EXPECT_GE(mean, prev) << "noise_var " << nv;
    prev = mean;
  }
}

}  // namespace
}  // namespace privfed
