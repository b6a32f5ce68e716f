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

#ifndef PRIVFED_CONFIG_H_
#define PRIVFED_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "privfed/ckks/ckks.h"
#include "privfed/ckks/packing.h"
#include "privfed/dataset.h"
#include "privfed/learners.h"
#include "privfed/svt.h"

namespace privfed {

enum class PrivacyMode { kPlain, kDp, kHe };
enum class Weighting { kUnit, kExamples };
enum class DataSource { kGenerate, kCsv };
enum class TransportMode { kSim, kTcp };

std::string_view to_string(PrivacyMode mode);

struct HeConfig {
  ckks::CkksParams params;
  uint64_t key_seed = 1;
  ckks::Packing packing = ckks::Packing::kPerTensor;
};

struct DataConfig {
  DataSource source = DataSource::kGenerate;
  GeneratorSpec generator = default_generator_spec();  // sites, seed, scale, beta
  std::filesystem::path csv_dir;  // <csv_dir>/<site>.csv when source is csv
  double train_frac = 0.8;
  uint64_t split_seed = 11;
};

struct CentralConfig {
  size_t folds = 10;
  size_t epochs = 100;
  size_t batch_size = 20000;
};

struct TransportConfig {
  TransportMode mode = TransportMode::kSim;
  double timeout_seconds = 600.0;
  std::string listen = "127.0.0.1:7007";
  std::string connect = "127.0.0.1:7007";
};

struct ExperimentConfig {
  ModelKind model = ModelKind::kLogisticRegression;
  size_t rounds = 250;
  size_t local_epochs = 20;
  double learning_rate = 0.01;
  double l2_penalty = 1e-4;
  uint64_t seed = 1;
  Weighting weighting = Weighting::kUnit;
  double threshold = 0.5;
  size_t default_batch_size = 20000;
  std::map<std::string, size_t> site_batch_size = {{"Stockholm", 100000}};

  PrivacyMode privacy = PrivacyMode::kPlain;
  std::optional<SvtConfig> dp;
  std::optional<HeConfig> he;

  DataConfig data;
  CentralConfig central;
  TransportConfig transport;
  std::filesystem::path output_dir = "out";

  std::vector<std::string> site_names() const;
  size_t batch_size_for(const std::string& site) const;
  TrainConfig train_config(const std::string& site, uint64_t seed) const;

  // Result-relevant settings only: transport and output_dir are excluded.
  nlohmann::json to_json() const;
  nlohmann::json environment_json() const;
  uint64_t fingerprint() const;
  std::string method_name() const;  // FedAvg, FedAvg_DP, FedAvg_HE
};

// Parsing is strict: unknown keys, wrong types, and mode blocks that do not
// match privacy.mode are kConfiguration errors. Messages name the offending
// key and, when parsing from text, its line.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when
// possible, otherwise taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Train/validation split of one configured site (generated or read from CSV).
Split load_site(const ExperimentConfig& cfg, const std::string& site);
std::vector<std::pair<std::string, Split>> load_all_sites(const ExperimentConfig& cfg);

}  // namespace privfed

#endif  // PRIVFED_CONFIG_H_
