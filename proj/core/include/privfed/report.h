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

#ifndef PRIVFED_REPORT_H_
#define PRIVFED_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "privfed/metrics.h"
#include "privfed/params.h"

namespace privfed {

struct ClientRoundRecord {
  std::string client_id;
  uint64_t steps = 0;
  MetricSet pre;   // received global model on the local validation split
  MetricSet post;  // locally trained model on the same split
  uint64_t payload_bytes = 0;
  double train_seconds = 0.0;
  double privacy_seconds = 0.0;  // DP filter or encryption time
  double arrival_seconds = 0.0;  // since the round's broadcast

  friend bool operator==(const ClientRoundRecord&, const ClientRoundRecord&) = default;
};

struct RoundRecord {
  uint64_t round = 0;
  std::vector<ClientRoundRecord> clients;  // ordered by client index
  uint64_t broadcast_bytes = 0;
  double aggregation_seconds = 0.0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct EvalRow {
  std::string name;  // site or fold
  MetricSet metrics;

  friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

struct EvalTable {
  std::string kind;  // "cross_site" or "kfold"
  std::vector<EvalRow> rows;
  MetricSummary summary;

  friend bool operator==(const EvalTable&, const EvalTable&) = default;
};

EvalTable make_eval_table(std::string kind, std::vector<EvalRow> rows);

struct RunReport {
  std::string method;   // cML, FedAvg, FedAvg_DP, FedAvg_HE
  std::string learner;  // LR or NN
  nlohmann::json config;
  nlohmann::json environment;  // transport and paths; not part of the result
  std::vector<RoundRecord> rounds;
  EvalTable evaluation;
  FlatVector initial_params;
  FlatVector final_params;
  bool aborted = false;
  std::string abort_reason;
  double wall_seconds = 0.0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

nlohmann::json to_json(const MetricSet& m);
MetricSet metric_set_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

// Report JSON without wall-clock fields or the environment block; equal for
// runs that differ only in timing or transport.
nlohmann::json comparable_content(const RunReport& report);

RunReport read_report(const std::filesystem::path& path);

struct SummaryRow {
  std::string method;
  std::string learner;
  MetricSummary summary;
};

inline constexpr const char* kSummaryHeader =
    "method,learner,auc_mean,auc_std,sens_mean,sens_std,spec_mean,spec_std";

SummaryRow summary_row(const RunReport& report);
// Rows sorted by learner, then method in the order cML, FedAvg, FedAvg_DP, FedAvg_HE.
void write_summary_csv(std::vector<SummaryRow> rows, const std::filesystem::path& path);

// report.json, rounds.csv, summary.csv and timings.csv under out_dir.
void emit_report(const RunReport& report, const std::filesystem::path& out_dir);

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace privfed

#endif  // PRIVFED_REPORT_H_
