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
#include <thread>

#include <gtest/gtest.h>

#include "privfed/channel.h"
#include "privfed/config.h"
#include "privfed/error.h"
#include "privfed/federation.h"
#include "privfed/learners.h"
#include "privfed/rng.h"
#include "privfed/tcp_channel.h"

namespace privfed {
namespace {

using namespace std::chrono_literals;

// Small cohort so that every test finishes in seconds.
ExperimentConfig small(const std::string& extra = "") {
  std::string text = R"({"rounds": 3, "local_epochs": 1, "learning_rate": 0.5, "batch_size": 500,
                         "transport": {"timeout_seconds": 60},
                         "data": {"scale_factor": 0.01}})";
  ExperimentConfig c = parse_config_text(text);
  if (!extra.empty()) {
    nlohmann::json j = c.to_json();
    j.merge_patch(nlohmann::json::parse(extra));
    c = parse_config(j);
    c.transport.timeout_seconds = 60;
  }
  return c;
}

TEST(Federation, ZeroRoundsEvaluatesInitialModel) {
  const ExperimentConfig cfg = small(R"({"rounds": 0})");
  const ServerResult r = run_simulation(cfg);
  ASSERT_FALSE(r.report.aborted) << r.report.abort_reason;
  EXPECT_TRUE(r.report.rounds.empty());
  EXPECT_EQ(r.report.final_params, r.report.initial_params);
  EXPECT_EQ(r.report.initial_params,
            flatten(init_params(cfg.model, derive_seed(cfg.seed, {kInitStream}))).values);
  ASSERT_EQ(r.report.evaluation.rows.size(), 4u);
  EXPECT_EQ(r.report.method, "FedAvg");
  EXPECT_EQ(r.report.learner, "LR");
}

TEST(Federation, ZeroLocalEpochsLeaveModelUnchanged) {
  for (const char* mode : {R"({"local_epochs": 0})",
                           R"({"local_epochs": 0, "privacy": {"mode": "dp", "dp": {}}})"}) {
    const ServerResult r = run_simulation(small(mode));
    ASSERT_FALSE(r.report.aborted) << r.report.abort_reason;
    EXPECT_EQ(r.report.final_params, r.report.initial_params) << mode;
    for (const auto& rec : r.report.rounds) {
      for (const auto& c : rec.clients) EXPECT_EQ(c.steps, 0u);
    }
  }
}

TEST(Federation, PlainMatchesManualFedAvg) {
  const ExperimentConfig cfg = small(R"({"rounds": 2, "model": "nn"})");
  const ServerResult r = run_simulation(cfg);
  ASSERT_FALSE(r.report.aborted) << r.report.abort_reason;

  // Replay the protocol with the learner API only.
  const auto layout = model_layout(cfg.model);
  FlatVector global = r.report.initial_params;
  const auto sites = load_all_sites(cfg);
  for (uint32_t round = 0; round < cfg.rounds; ++round) {
    FlatVector sum(global.size(), 0.0);
    for (uint32_t k = 0; k < sites.size(); ++k) {
      const ParamSet g = unflatten(global, layout);
      const auto trained = train_local(cfg.model, g, sites[k].second.train,
                                       cfg.train_config(sites[k].first, derive_seed(cfg.seed, {kTrainStream, k, round})));
      const FlatVector d = flatten(compute_delta(trained.params, g)).values;
      for (size_t i = 0; i < d.size(); ++i) sum[i] += d[i];
    }
    for (size_t i = 0; i < global.size(); ++i) global[i] += sum[i] / static_cast<double>(sites.size());
  }
  ASSERT_EQ(r.report.final_params.size(), global.size());
  for (size_t i = 0; i < global.size(); ++i) EXPECT_NEAR(r.report.final_params[i], global[i], 1e-12);
}

TEST(Federation, DpReleaseIsBoundedBySteps) {
  const ExperimentConfig cfg = small(R"({"privacy": {"mode": "dp", "dp": {"gamma": 0.01}}})");
  const auto sites = load_all_sites(cfg);
  const auto layout = model_layout(cfg.model);
  FederatedClient client(cfg, sites[0].first, 0, sites[0].second);
  BroadcastBody b;
  b.params = flatten(init_params(cfg.model, 3)).values;
  for (uint32_t round = 0; round < 5; ++round) {
    const UpdateBody u = client.execute_round(round, b);
    ASSERT_GT(u.steps, 0u);
    ASSERT_EQ(u.values.size(), layout.total_length());
    for (double v : u.values) EXPECT_LE(std::abs(v), cfg.dp->gamma * u.steps + 1e-15);
    b.params = client.global_params();
  }
}

TEST(Federation, HeChunkCounts) {
  for (const char* model : {"lr", "nn"}) {
    const ExperimentConfig cfg =
        small(std::string(R"({"model": ")") + model + R"(", "privacy": {"mode": "he", "he": {}}})");
    const auto sites = load_all_sites(cfg);
    FederatedClient client(cfg, sites[0].first, 0, sites[0].second);
    BroadcastBody b;
    b.params = flatten(init_params(cfg.model, 3)).values;
    const UpdateBody u = client.execute_round(0, b);
    EXPECT_EQ(u.chunks.size(), std::string(model) == "lr" ? 2u : 5u);
    EXPECT_TRUE(u.values.empty());
  }
}

TEST(Federation, HeTracksPlainClosely) {
  const ServerResult plain = run_simulation(small(R"({"model": "nn"})"));
  const ServerResult he = run_simulation(small(R"({"model": "nn", "privacy": {"mode": "he", "he": {}}})"));
  ASSERT_FALSE(he.report.aborted) << he.report.abort_reason;
  EXPECT_EQ(he.report.method, "FedAvg_HE");
  ASSERT_EQ(he.report.final_params.size(), plain.report.final_params.size());
  for (size_t i = 0; i < plain.report.final_params.size(); ++i) {
    EXPECT_NEAR(he.report.final_params[i], plain.report.final_params[i], 1e-6);
  }
}

TEST(Federation, ExampleWeightingMatchesWeightedMean) {
  const ExperimentConfig cfg = small(R"({"rounds": 1, "weighting": "examples"})");
  const ServerResult r = run_simulation(cfg);
  ASSERT_FALSE(r.report.aborted) << r.report.abort_reason;
  const auto sites = load_all_sites(cfg);
  const auto layout = model_layout(cfg.model);
  const ParamSet g = unflatten(r.report.initial_params, layout);
  FlatVector sum(g.size() ? r.report.initial_params.size() : 0, 0.0);
  double total = 0.0;
  for (uint32_t k = 0; k < sites.size(); ++k) {
    const auto trained = train_local(cfg.model, g, sites[k].second.train,
                                     cfg.train_config(sites[k].first, derive_seed(cfg.seed, {kTrainStream, k, 0})));
    const FlatVector d = flatten(compute_delta(trained.params, g)).values;
    const double w = static_cast<double>(sites[k].second.train.size());
    for (size_t i = 0; i < d.size(); ++i) sum[i] += w * d[i];
    total += w;
  }
  for (size_t i = 0; i < sum.size(); ++i) {
    EXPECT_NEAR(r.report.final_params[i], r.report.initial_params[i] + sum[i] / total, 1e-12);
  }
}

TEST(Federation, RoundBarrierHolds) {
  const ServerResult r = run_simulation(small(R"({"rounds": 4})"));
  ASSERT_FALSE(r.report.aborted);
  std::vector<double> agg(4, -1.0);
  for (const auto& e : r.events) {
    if (e.kind == FederationEvent::Kind::kAggregate) agg[e.round] = e.seconds;
  }
  size_t arrivals = 0;
  for (const auto& e : r.events) {
    if (e.kind != FederationEvent::Kind::kArrival) continue;
    ++arrivals;
    EXPECT_LE(e.seconds, agg[e.round]);                      // every update precedes its aggregation
    if (e.round > 0) {
      EXPECT_GE(e.seconds, agg[e.round - 1]);  // and follows the previous one
    }
  }
  EXPECT_EQ(arrivals, 16u);
  for (const auto& rec : r.report.rounds) EXPECT_EQ(rec.clients.size(), 4u);
}

TEST(Federation, RepeatedRunsAreIdentical) {
  const ExperimentConfig cfg = small(R"({"model": "nn", "privacy": {"mode": "dp", "dp": {}}})");
  const ServerResult a = run_simulation(cfg);
  const ServerResult b = run_simulation(cfg);
  EXPECT_EQ(comparable_content(a.report), comparable_content(b.report));
}

ServerResult run_over_tcp(ExperimentConfig cfg, const std::string& token) {
  cfg.transport.mode = TransportMode::kTcp;
  TcpListener listener({"127.0.0.1", 0});
  std::vector<std::thread> threads;
  for (const auto& site : cfg.site_names()) {
    threads.emplace_back([&cfg, &listener, site, token] {
      auto ch = tcp_connect({"127.0.0.1", listener.port()}, 5s);
      client_run(cfg, site, load_site(cfg, site), *ch, token);
    });
  }
  ServerResult r = server_run(cfg, listener, token);
  for (auto& t : threads) t.join();
  return r;
}

TEST(Federation, TcpMatchesSimulation) {
  const ExperimentConfig cfg = small(R"({"model": "nn", "privacy": {"mode": "he", "he": {}}, "rounds": 2})");
  const ServerResult sim = run_simulation(cfg);
  const ServerResult tcp = run_over_tcp(cfg, "secret");
  ASSERT_FALSE(tcp.report.aborted) << tcp.report.abort_reason;
  EXPECT_EQ(comparable_content(sim.report), comparable_content(tcp.report));
}

TEST(Federation, WrongTokenIsRejected) {
  ExperimentConfig cfg = small(R"({"data": {"scale_factor": 0.01, "sites": ["Uppsala"]}})");
  cfg.transport.timeout_seconds = 2;
  TcpListener listener({"127.0.0.1", 0});
  ErrorKind client_error = ErrorKind::kIo;
  std::thread intruder([&] {
    auto ch = tcp_connect({"127.0.0.1", listener.port()}, 5s);
    try {
      client_run(cfg, "Uppsala", load_site(cfg, "Uppsala"), *ch, "wrong");
    } catch (const Error& e) {
      client_error = e.kind();
    }
  });
  const ServerResult r = server_run(cfg, listener, "right");
  intruder.join();
  EXPECT_EQ(client_error, ErrorKind::kAuth);
  EXPECT_TRUE(r.report.aborted);
  EXPECT_NE(r.report.abort_reason.find("timeout"), std::string::npos) << r.report.abort_reason;
}

TEST(Federation, SilentClientTimesOut) {
  ExperimentConfig cfg = small(R"({"data": {"scale_factor": 0.01, "sites": ["Uppsala", "Stockholm"]}})");
  cfg.transport.timeout_seconds = 3;
  Split uppsala = load_site(cfg, "Uppsala");
  SimNetwork net;
  auto listener = net.listen();
  std::shared_ptr<Channel> good = net.connect();
  std::shared_ptr<Channel> silent = net.connect();
  std::thread t1([&] {
    try {
      client_run(cfg, "Uppsala", std::move(uppsala), *good, "t");
    } catch (const Error&) {
    }
  });
  std::thread t2([&] {
    silent->send({MsgType::kJoin, 0, encode(JoinBody{"t", "Stockholm", 10, cfg.fingerprint()})});
    while (true) {
      try {
        if (auto f = silent->recv(100ms); f && f->type == MsgType::kError) break;
      } catch (const Error&) {
        break;
      }
    }
  });
  const ServerResult r = server_run(cfg, *listener, "t");
  t1.join();
  t2.join();
  EXPECT_TRUE(r.report.aborted);
  EXPECT_NE(r.report.abort_reason.find("Stockholm"), std::string::npos) << r.report.abort_reason;
  EXPECT_TRUE(r.report.rounds.empty());
}

TEST(Federation, ClientFailureAbortsRun) {
  ExperimentConfig cfg = small(R"({"data": {"scale_factor": 0.01, "sites": ["Uppsala", "Stockholm"]}})");
  SimNetwork net;
  auto listener = net.listen();
  std::shared_ptr<Channel> good = net.connect();
  std::shared_ptr<Channel> flaky = net.connect();
  std::thread t1([&] {
    try {
      client_run(cfg, "Uppsala", load_site(cfg, "Uppsala"), *good, "t");
    } catch (const Error&) {
    }
  });
  std::thread t2([&] {
    flaky->send({MsgType::kJoin, 0, encode(JoinBody{"t", "Stockholm", 10, cfg.fingerprint()})});
    (void)flaky->recv(5s);  // JOIN_ACK
    (void)flaky->recv(5s);  // round 0 broadcast
    flaky->close();
  });
  const ServerResult r = server_run(cfg, *listener, "t");
  t1.join();
  t2.join();
  EXPECT_TRUE(r.report.aborted);
  EXPECT_NE(r.report.abort_reason.find("disconnected"), std::string::npos) << r.report.abort_reason;
}

TEST(Federation, ConfigMismatchIsRejected) {
  ExperimentConfig cfg = small(R"({"data": {"scale_factor": 0.01, "sites": ["Uppsala"]}})");
  cfg.transport.timeout_seconds = 2;
  ExperimentConfig other = cfg;
  other.rounds += 1;
  SimNetwork net;
  auto listener = net.listen();
  std::shared_ptr<Channel> ch = net.connect();
  ErrorKind kind = ErrorKind::kIo;
  std::thread t([&] {
    try {
      client_run(other, "Uppsala", load_site(other, "Uppsala"), *ch, "t");
    } catch (const Error& e) {
      kind = e.kind();
    }
  });
  const ServerResult r = server_run(cfg, *listener, "t");
  t.join();
  EXPECT_EQ(kind, ErrorKind::kAuth);
  EXPECT_TRUE(r.report.aborted);
}

}  // namespace
}  // namespace privfed
