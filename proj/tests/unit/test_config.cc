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

#include <gtest/gtest.h>

#include "privfed/config.h"
#include "privfed/error.h"

namespace privfed {
namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfiguration);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

TEST(Config, EmptyObjectGivesDefaults) {
  const ExperimentConfig c = parse_config_text("{}");
  EXPECT_EQ(c.model, ModelKind::kLogisticRegression);
  EXPECT_EQ(c.rounds, 250u);
  EXPECT_EQ(c.local_epochs, 20u);
  EXPECT_EQ(c.learning_rate, 0.01);
  EXPECT_EQ(c.batch_size_for("Ostergotland"), 20000u);
  EXPECT_EQ(c.batch_size_for("Stockholm"), 100000u);
  EXPECT_EQ(c.privacy, PrivacyMode::kPlain);
  EXPECT_EQ(c.site_names(), (std::vector<std::string>{"Ostergotland", "Sodermanland", "Stockholm", "Uppsala"}));
  EXPECT_EQ(c.method_name(), "FedAvg");
}

TEST(Config, ModeBlocks) {
  const auto dp = parse_config_text(R"({"privacy": {"mode": "dp", "dp": {"noise_var": 20}}})");
  ASSERT_TRUE(dp.dp.has_value());
  EXPECT_EQ(dp.dp->noise_var, 20.0);
  EXPECT_EQ(dp.dp->fraction, 0.9);
  EXPECT_EQ(dp.method_name(), "FedAvg_DP");
  const auto he = parse_config_text(R"({"privacy": {"mode": "he", "he": {}}})");
  ASSERT_TRUE(he.he.has_value());
  EXPECT_EQ(he.he->params.poly_degree, 8192u);
  EXPECT_EQ(he.method_name(), "FedAvg_HE");

  EXPECT_TRUE(contains(config_error(R"({"privacy": {"mode": "dp"}})"), "privacy.dp"));
  EXPECT_TRUE(contains(config_error(R"({"privacy": {"mode": "plain", "he": {}}})"), "privacy.he"));
  EXPECT_TRUE(contains(config_error(R"({"privacy": {"mode": "dp", "dp": {"fraction": 0}}})"), "fraction"));
}

TEST(Config, UnknownKeyReportsLineAndPath) {
  const std::string text = "{\n  \"rounds\": 3,\n  \"data\": {\n    \"scale\": 0.1\n  }\n}\n";
  const std::string msg = config_error(text);
  EXPECT_TRUE(contains(msg, "line 4")) << msg;
  EXPECT_TRUE(contains(msg, "data.scale")) << msg;
}

TEST(Config, TypeAndRangeErrors) {
  EXPECT_TRUE(contains(config_error("{\n\"rounds\": \"many\"}"), "line 2"));
  EXPECT_TRUE(contains(config_error(R"({"learning_rate": -1})"), "learning_rate"));
  EXPECT_TRUE(contains(config_error(R"({"model": "svm"})"), "model"));
  EXPECT_TRUE(contains(config_error(R"({"data": {"scale_factor": 2}})"), "scale_factor"));
  EXPECT_TRUE(contains(config_error(R"({"data": {"sites": ["Atlantis"]}})"), "sites"));
  EXPECT_TRUE(contains(config_error(R"({"data": {"source": "csv"}})"), "csv_dir"));
  EXPECT_TRUE(contains(config_error(R"({"privacy": {"mode": "he", "he": {"poly_degree": 1000}}})"), "he"));
  EXPECT_TRUE(contains(config_error("{\n\n  \"rounds\": 3,,\n}"), "line 3"));
}

TEST(Config, BatchSizeForms) {
  EXPECT_EQ(parse_config_text(R"({"batch_size": 64})").batch_size_for("Stockholm"), 64u);
  const auto c = parse_config_text(R"({"batch_size": {"default": 10, "sites": {"Uppsala": 7}}})");
  EXPECT_EQ(c.batch_size_for("Uppsala"), 7u);
  EXPECT_EQ(c.batch_size_for("Stockholm"), 10u);
}

TEST(Config, JsonRoundtripAndFingerprint) {
  const auto c = parse_config_text(
      R"({"model": "nn", "rounds": 4, "privacy": {"mode": "dp", "dp": {"gamma": 0.02}},
          "data": {"scale_factor": 0.01, "sites": ["Ostergotland", "Uppsala"]}})");
  const auto again = parse_config(c.to_json());
  EXPECT_EQ(again.to_json(), c.to_json());
  EXPECT_EQ(again.fingerprint(), c.fingerprint());
  auto tcp = c;
  tcp.transport.mode = TransportMode::kTcp;
  tcp.output_dir = "elsewhere";
  EXPECT_EQ(tcp.fingerprint(), c.fingerprint());
  auto other = c;
  other.rounds = 5;
  EXPECT_NE(other.fingerprint(), c.fingerprint());
}

TEST(Config, Overrides) {
  nlohmann::json j = nlohmann::json::object();
  apply_override(j, "rounds=7");
  apply_override(j, "privacy.mode=dp");
  apply_override(j, "privacy.dp.noise_var=20");
  apply_override(j, "data.sites=[\"Ostergotland\",\"Uppsala\"]");
  const auto c = parse_config(j);
  EXPECT_EQ(c.rounds, 7u);
  EXPECT_EQ(c.privacy, PrivacyMode::kDp);
  EXPECT_EQ(c.dp->noise_var, 20.0);
  EXPECT_EQ(c.site_names().size(), 2u);
  apply_override(j, "privacy.dp=null");
  apply_override(j, "privacy.mode=plain");
  apply_override(j, "no.such.key=null");
  EXPECT_FALSE(j["privacy"].contains("dp"));
  EXPECT_EQ(parse_config(j).privacy, PrivacyMode::kPlain);
  EXPECT_THROW(apply_override(j, "novalue"), Error);
  EXPECT_THROW(apply_override(j, "rounds.x=1"), Error);
}

TEST(Config, TrainConfigUsesSiteBatch) {
  const auto c = parse_config_text(R"({"model": "nn", "local_epochs": 3, "learning_rate": 0.5})");
  const TrainConfig t = c.train_config("Stockholm", 99);
  EXPECT_EQ(t.local_epochs, 3u);
  EXPECT_EQ(t.batch_size, 100000u);
  EXPECT_EQ(t.learning_rate, 0.5);
  EXPECT_EQ(t.seed, 99u);
}

}  // namespace
}  // namespace privfed
