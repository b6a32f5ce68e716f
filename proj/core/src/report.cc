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

#include "privfed/report.h"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "privfed/error.h"

namespace privfed {
namespace {

using nlohmann::json;

json to_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

MeanStd mean_std_from_json(const json& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

int method_rank(const std::string& method) {
  static const char* order[] = {"cML", "FedAvg", "FedAvg_DP", "FedAvg_HE"};
  for (int i = 0; i < 4; ++i) {
    if (method == order[i]) return i;
  }
  return 4;
}

void write_summary_line(std::ostream& out, const SummaryRow& r) {
  out << r.method << ',' << r.learner << ',' << format_double(r.summary.auc.mean) << ','
      << format_double(r.summary.auc.std) << ',' << format_double(r.summary.sensitivity.mean) << ','
      << format_double(r.summary.sensitivity.std) << ',' << format_double(r.summary.specificity.mean)
      << ',' << format_double(r.summary.specificity.std) << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

EvalTable make_eval_table(std::string kind, std::vector<EvalRow> rows) {
  std::vector<MetricSet> sets;
  for (const auto& r : rows) sets.push_back(r.metrics);
  return {std::move(kind), std::move(rows), summarize(sets)};
}

json to_json(const MetricSet& m) {
  return {{"auc", m.auc},     {"sensitivity", m.sensitivity}, {"specificity", m.specificity},
          {"n_pos", m.n_pos}, {"n_neg", m.n_neg},             {"threshold", m.threshold}};
}

MetricSet metric_set_from_json(const json& j) {
  MetricSet m;
  m.auc = j.at("auc").get<double>();
  m.sensitivity = j.at("sensitivity").get<double>();
  m.specificity = j.at("specificity").get<double>();
  m.n_pos = j.at("n_pos").get<size_t>();
  m.n_neg = j.at("n_neg").get<size_t>();
  m.threshold = j.at("threshold").get<double>();
  return m;
}

json to_json(const RunReport& report) {
  json rounds = json::array();
  for (const auto& r : report.rounds) {
    json clients = json::array();
    for (const auto& c : r.clients) {
      clients.push_back({{"client_id", c.client_id},
                         {"steps", c.steps},
                         {"pre", to_json(c.pre)},
                         {"post", to_json(c.post)},
                         {"payload_bytes", c.payload_bytes},
                         {"train_seconds", c.train_seconds},
                         {"privacy_seconds", c.privacy_seconds},
                         {"arrival_seconds", c.arrival_seconds}});
    }
    rounds.push_back({{"round", r.round},
                      {"clients", std::move(clients)},
                      {"broadcast_bytes", r.broadcast_bytes},
                      {"aggregation_seconds", r.aggregation_seconds}});
  }
  json rows = json::array();
  for (const auto& row : report.evaluation.rows) {
    rows.push_back({{"name", row.name}, {"metrics", to_json(row.metrics)}});
  }
  const auto& s = report.evaluation.summary;
  return {{"method", report.method},
          {"learner", report.learner},
          {"config", report.config},
          {"environment", report.environment},
          {"aborted", report.aborted},
          {"abort_reason", report.abort_reason},
          {"rounds", std::move(rounds)},
          {"evaluation",
           {{"kind", report.evaluation.kind},
            {"rows", std::move(rows)},
            {"summary",
             {{"auc", to_json(s.auc)},
              {"sensitivity", to_json(s.sensitivity)},
              {"specificity", to_json(s.specificity)}}}}},
          {"initial_params", report.initial_params},
          {"final_params", report.final_params},
          {"wall_seconds", report.wall_seconds}};
}

RunReport report_from_json(const json& j) {
  try {
    RunReport r;
    r.method = j.at("method").get<std::string>();
    r.learner = j.at("learner").get<std::string>();
    r.config = j.at("config");
    r.environment = j.value("environment", json::object());
    r.aborted = j.at("aborted").get<bool>();
    r.abort_reason = j.at("abort_reason").get<std::string>();
    for (const auto& jr : j.at("rounds")) {
      RoundRecord rr;
      rr.round = jr.at("round").get<uint64_t>();
      rr.broadcast_bytes = jr.at("broadcast_bytes").get<uint64_t>();
      rr.aggregation_seconds = jr.at("aggregation_seconds").get<double>();
      for (const auto& jc : jr.at("clients")) {
        ClientRoundRecord c;
        c.client_id = jc.at("client_id").get<std::string>();
        c.steps = jc.at("steps").get<uint64_t>();
        c.pre = metric_set_from_json(jc.at("pre"));
        c.post = metric_set_from_json(jc.at("post"));
        c.payload_bytes = jc.at("payload_bytes").get<uint64_t>();
        c.train_seconds = jc.at("train_seconds").get<double>();
        c.privacy_seconds = jc.at("privacy_seconds").get<double>();
        c.arrival_seconds = jc.at("arrival_seconds").get<double>();
        rr.clients.push_back(std::move(c));
      }
      r.rounds.push_back(std::move(rr));
    }
    const auto& ev = j.at("evaluation");
    r.evaluation.kind = ev.at("kind").get<std::string>();
    for (const auto& row : ev.at("rows")) {
      r.evaluation.rows.push_back({row.at("name").get<std::string>(), metric_set_from_json(row.at("metrics"))});
    }
    const auto& s = ev.at("summary");
    r.evaluation.summary = {mean_std_from_json(s.at("auc")), mean_std_from_json(s.at("sensitivity")),
                            mean_std_from_json(s.at("specificity"))};
    r.initial_params = j.at("initial_params").get<FlatVector>();
    r.final_params = j.at("final_params").get<FlatVector>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed report: ") + e.what());
  }
}

json comparable_content(const RunReport& report) {
  json j = to_json(report);
  j.erase("environment");
  j.erase("wall_seconds");
  for (auto& r : j["rounds"]) {
    r.erase("aggregation_seconds");
    for (auto& c : r["clients"]) {
      c.erase("train_seconds");
      c.erase("privacy_seconds");
      c.erase("arrival_seconds");
    }
  }
  return j;
}

RunReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  return report_from_json(j);
}

SummaryRow summary_row(const RunReport& report) {
  return {report.method, report.learner, report.evaluation.summary};
}

void write_summary_csv(std::vector<SummaryRow> rows, const std::filesystem::path& path) {
  std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    if (a.learner != b.learner) return a.learner < b.learner;
    return method_rank(a.method) < method_rank(b.method);
  });
  auto out = open_out(path);
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) write_summary_line(out, r);
}

void emit_report(const RunReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir.string() + ": " + ec.message());

  {
    auto out = open_out(out_dir / "report.json");
    out << to_json(report).dump(2) << '\n';
  }
  {
    auto out = open_out(out_dir / "rounds.csv");
    out << "round,client_id,steps,pre_auc,pre_sensitivity,pre_specificity,post_auc,"
           "post_sensitivity,post_specificity,payload_bytes,train_seconds,privacy_seconds,"
           "arrival_seconds,aggregation_seconds\n";
    for (const auto& r : report.rounds) {
      for (const auto& c : r.clients) {
        out << r.round << ',' << c.client_id << ',' << c.steps << ',' << format_double(c.pre.auc) << ','
            << format_double(c.pre.sensitivity) << ',' << format_double(c.pre.specificity) << ','
            << format_double(c.post.auc) << ',' << format_double(c.post.sensitivity) << ','
            << format_double(c.post.specificity) << ',' << c.payload_bytes << ','
            << format_double(c.train_seconds) << ',' << format_double(c.privacy_seconds) << ','
            << format_double(c.arrival_seconds) << ',' << format_double(r.aggregation_seconds) << '\n';
      }
    }
  }
  write_summary_csv({summary_row(report)}, out_dir / "summary.csv");
  {
    double train = 0, privacy = 0, arrival = 0, aggregation = 0, payload = 0, broadcast = 0;
    size_t samples = 0;
    for (const auto& r : report.rounds) {
      aggregation += r.aggregation_seconds;
      broadcast += static_cast<double>(r.broadcast_bytes);
      for (const auto& c : r.clients) {
        train += c.train_seconds;
        privacy += c.privacy_seconds;
        arrival += c.arrival_seconds;
        payload += static_cast<double>(c.payload_bytes);
        ++samples;
      }
    }
    const double nr = report.rounds.empty() ? 1.0 : static_cast<double>(report.rounds.size());
    const double ns = samples == 0 ? 1.0 : static_cast<double>(samples);
    auto out = open_out(out_dir / "timings.csv");
    out << "method,learner,rounds,total_seconds,mean_train_seconds,mean_privacy_seconds,"
           "mean_arrival_seconds,mean_aggregation_seconds,mean_payload_bytes,mean_broadcast_bytes\n";
    out << report.method << ',' << report.learner << ',' << report.rounds.size() << ','
        << format_double(report.wall_seconds) << ',' << format_double(train / ns) << ','
        << format_double(privacy / ns) << ',' << format_double(arrival / ns) << ','
        << format_double(aggregation / nr) << ',' << format_double(payload / ns) << ','
        << format_double(broadcast / nr) << '\n';
  }
}

}  // namespace privfed
