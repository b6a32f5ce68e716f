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

// privfed: command line front end for data generation, the centralized
// baseline, simulated and networked federated runs, and report merging.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "privfed/config.h"
#include "privfed/dataset.h"
#include "privfed/error.h"
#include "privfed/experiment.h"
#include "privfed/federation.h"
#include "privfed/report.h"
#include "privfed/tcp_channel.h"

namespace fs = std::filesystem;
using namespace privfed;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "Experiment config (JSON)");
  cmd->add_option("--set", opts.overrides, "Override a config key, e.g. --set privacy.mode=dp (key=null removes it)")
      ->take_all();
  cmd->add_option("--out", opts.out, "Output directory (overrides output_dir)");
}

ExperimentConfig load(const CommonOptions& opts) {
  ExperimentConfig cfg = load_config(opts.config, opts.overrides);
  if (!opts.out.empty()) cfg.output_dir = opts.out;
  return cfg;
}

std::string token_from_env() {
  const char* token = std::getenv("PRIVFED_TOKEN");
  if (token == nullptr || *token == '\0') {
    throw Error(ErrorKind::kConfiguration, "PRIVFED_TOKEN must be set for networked roles");
  }
  return token;
}

int finish_run(const RunReport& report, const fs::path& out) {
  emit_report(report, out);
  if (report.aborted) {
    std::cerr << "run aborted: " << report.abort_reason << "\n";
    return kExitRuntime;
  }
  const auto& s = report.evaluation.summary;
  std::cout << report.method << " " << report.learner << ": auc " << format_double(s.auc.mean) << " +- "
            << format_double(s.auc.std) << " (" << report.evaluation.rows.size() << " "
            << report.evaluation.kind << " rows), " << format_double(report.wall_seconds) << " s\n"
            << "wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving federated learning experiments"};
  app.require_subcommand(1);

  CommonOptions gen_opts, central_opts, sim_opts, server_opts, client_opts, calib_opts;
  std::string listen, connect, site;
  std::vector<std::string> report_inputs;
  std::string report_out = "summary.csv";
  std::vector<double> multipliers = {0.5, 0.75, 1.0, 1.25, 1.5, 2.0};

  auto* gen = app.add_subcommand("generate-data", "Write per-site CSV files");
  add_common(gen, gen_opts);
  auto* central = app.add_subcommand("run-central", "Pooled k-fold centralized baseline");
  add_common(central, central_opts);
  auto* sim = app.add_subcommand("run-sim", "Server and all clients in one process");
  add_common(sim, sim_opts);
  auto* server = app.add_subcommand("server", "Networked server role");
  add_common(server, server_opts);
  server->add_option("--listen", listen, "HOST:PORT to listen on (port 0 picks one)");
  auto* client = app.add_subcommand("client", "Networked client role");
  add_common(client, client_opts);
  client->add_option("--connect", connect, "Server HOST:PORT");
  client->add_option("--site", site, "Site this client represents")->required();
  auto* report = app.add_subcommand("report", "Merge report.json files into one summary.csv");
  report->add_option("inputs", report_inputs, "report.json files or run directories")->required();
  report->add_option("--out", report_out, "Summary CSV path");
  auto* calib = app.add_subcommand("calibrate", "AUC of the generating model per coefficient multiplier");
  add_common(calib, calib_opts);
  calib->add_option("--multipliers", multipliers, "Multipliers applied to the coefficients");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const ExperimentConfig cfg = load(gen_opts);
      if (cfg.data.source != DataSource::kGenerate) {
        throw Error(ErrorKind::kConfiguration, "generate-data needs data.source = generate");
      }
      fs::create_directories(cfg.output_dir);
      for (const auto& s : generate_cohort(cfg.data.generator)) {
        const fs::path path = cfg.output_dir / (s.site + ".csv");
        write_csv(s.data, path);
        std::cout << path.string() << ": " << s.data.count_label(0) << " negative, "
                  << s.data.count_label(1) << " positive\n";
      }
      return 0;
    }
    if (central->parsed()) {
      const ExperimentConfig cfg = load(central_opts);
      return finish_run(run_central(cfg), cfg.output_dir);
    }
    if (sim->parsed()) {
      const ExperimentConfig cfg = load(sim_opts);
      return finish_run(run_simulation(cfg).report, cfg.output_dir);
    }
    if (server->parsed()) {
      ExperimentConfig cfg = load(server_opts);
      if (!listen.empty()) cfg.transport.listen = listen;
      cfg.transport.mode = TransportMode::kTcp;
      const std::string token = token_from_env();
      TcpListener listener(parse_host_port(cfg.transport.listen));
      std::cout << "listening on port " << listener.port() << std::endl;
      return finish_run(server_run(cfg, listener, token).report, cfg.output_dir);
    }
    if (client->parsed()) {
      ExperimentConfig cfg = load(client_opts);
      if (!connect.empty()) cfg.transport.connect = connect;
      cfg.transport.mode = TransportMode::kTcp;
      const std::string token = token_from_env();
      Split data = load_site(cfg, site);
      auto channel = tcp_connect(parse_host_port(cfg.transport.connect),
                                 std::chrono::milliseconds(static_cast<int64_t>(cfg.transport.timeout_seconds * 1000)));
      client_run(cfg, site, std::move(data), *channel, token);
      std::cout << site << ": done\n";
      return 0;
    }
    if (report->parsed()) {
      std::vector<SummaryRow> rows;
      for (const auto& input : report_inputs) {
        fs::path p = input;
        if (fs::is_directory(p)) p /= "report.json";
        rows.push_back(summary_row(read_report(p)));
      }
      write_summary_csv(std::move(rows), report_out);
      std::cout << "wrote " << report_out << "\n";
      return 0;
    }
    if (calib->parsed()) {
      const ExperimentConfig cfg = load(calib_opts);
      std::cout << "multiplier,auc\n";
      for (const auto& p : calibrate_coefficients(cfg, multipliers)) {
        std::cout << format_double(p.multiplier) << "," << format_double(p.auc) << "\n";
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "privfed: " << e.what() << "\n";
    return e.kind() == ErrorKind::kConfiguration ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "privfed: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
