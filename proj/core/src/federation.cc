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

#include "privfed/federation.h"

#include <atomic>
#include <chrono>
#include <exception>
#include <thread>

#include "privfed/aggregate.h"
#include "privfed/ckks/packing.h"
#include "privfed/error.h"
#include "privfed/learners.h"
#include "privfed/metrics.h"
#include "privfed/rng.h"
#include "privfed/svt.h"

namespace privfed {
namespace {

using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

milliseconds to_ms(double seconds) { return milliseconds(static_cast<int64_t>(seconds * 1000.0)); }

milliseconds remaining(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<milliseconds>(deadline - Clock::now());
  return left.count() > 0 ? left : milliseconds(0);
}

std::string learner_label(ModelKind kind) {
  return kind == ModelKind::kLogisticRegression ? "LR" : "NN";
}

PayloadMode payload_mode(PrivacyMode mode) {
  switch (mode) {
    case PrivacyMode::kPlain: return PayloadMode::kPlain;
    case PrivacyMode::kDp: return PayloadMode::kDp;
    case PrivacyMode::kHe: return PayloadMode::kHe;
  }
  return PayloadMode::kPlain;
}

std::vector<std::vector<uint8_t>> serialize_all(const ckks::CkksContext& ctx,
                                                const std::vector<ckks::Ciphertext>& cts) {
  std::vector<std::vector<uint8_t>> out;
  out.reserve(cts.size());
  for (const auto& ct : cts) out.push_back(ckks::serialize_ct(ctx, ct));
  return out;
}

std::vector<ckks::Ciphertext> deserialize_all(const ckks::CkksContext& ctx,
                                              const std::vector<std::vector<uint8_t>>& blobs) {
  std::vector<ckks::Ciphertext> out;
  out.reserve(blobs.size());
  for (const auto& b : blobs) out.push_back(ckks::deserialize_ct(ctx, b));
  return out;
}

}  // namespace

HeMaterial make_he_material(const HeConfig& cfg) {
  HeMaterial m;
  m.context = ckks::make_context(cfg.params);
  Rng rng(derive_seed(cfg.key_seed, {}));
  m.keys = ckks::keygen(*m.context, rng);
  return m;
}

// ---------------------------------------------------------------------------
// Client

FederatedClient::FederatedClient(const ExperimentConfig& cfg, std::string site, uint32_t index, Split data)
    : cfg_(cfg),
      site_(std::move(site)),
      index_(index),
      data_(std::move(data)),
      manifest_(model_layout(cfg.model)) {
  if (cfg.privacy == PrivacyMode::kHe) he_ = make_he_material(*cfg.he);
}

void FederatedClient::install(const BroadcastBody& incoming) {
  if (incoming.kind == StateKind::kParams) {
    if (incoming.params.size() != manifest_.total_length()) {
      throw Error(ErrorKind::kProtocol, "broadcast parameter count does not match the model");
    }
    global_ = incoming.params;
    installed_ = true;
    return;
  }
  if (!he_) throw Error(ErrorKind::kProtocol, "encrypted broadcast outside he mode");
  if (!installed_) throw Error(ErrorKind::kProtocol, "encrypted update before the initial model");
  const auto t0 = Clock::now();
  const auto cts = deserialize_all(*he_->context, incoming.chunks);
  const FlatVector delta = ckks::decrypt_update(*he_->context, cts, manifest_, cfg_.he->packing,
                                                he_->keys.secret);
  for (size_t i = 0; i < global_.size(); ++i) global_[i] += delta[i];
  pending_privacy_seconds_ += seconds_since(t0);
}

MetricSet FederatedClient::evaluate(const ParamSet& params) const {
  const auto scores = predict_batch(cfg_.model, params, data_.valid);
  std::vector<int> labels;
  labels.reserve(data_.valid.size());
  for (const auto& r : data_.valid.rows) labels.push_back(r.label);
  return evaluate_scores(scores, labels, cfg_.threshold);
}

UpdateBody FederatedClient::execute_round(uint32_t round, const BroadcastBody& incoming) {
  pending_privacy_seconds_ = 0.0;
  install(incoming);
  const ParamSet global = unflatten(global_, manifest_);

  UpdateBody out;
  out.client_id = site_;
  out.mode = payload_mode(cfg_.privacy);
  out.pre = evaluate(global);

  const auto t_train = Clock::now();
  const TrainResult trained =
      train_local(cfg_.model, global, data_.train,
                  cfg_.train_config(site_, derive_seed(cfg_.seed, {kTrainStream, index_, round})));
  out.train_seconds = seconds_since(t_train);
  out.steps = static_cast<uint32_t>(trained.stats.steps);
  out.post = evaluate(trained.params);

  FlatVector delta = flatten(compute_delta(trained.params, global)).values;
  const double weight =
      cfg_.weighting == Weighting::kExamples ? static_cast<double>(data_.train.size()) : 1.0;

  const auto t_priv = Clock::now();
  switch (cfg_.privacy) {
    case PrivacyMode::kPlain:
      out.values = std::move(delta);
      break;
    case PrivacyMode::kDp:
      if (trained.stats.steps == 0) {
        out.values = std::move(delta);  // nothing trained, nothing released
      } else {
        Rng rng(derive_seed(cfg_.seed, {kDpStream, index_, round}));
        out.values = svt_filter(delta, trained.stats.steps, *cfg_.dp, rng);
      }
      break;
    case PrivacyMode::kHe: {
      for (double& v : delta) v *= weight;
      Rng rng(derive_seed(cfg_.seed, {kHeStream, index_, round}));
      const auto cts = ckks::encrypt_update(*he_->context, delta, manifest_, cfg_.he->packing,
                                            he_->keys.public_key, rng);
      out.chunks = serialize_all(*he_->context, cts);
      break;
    }
  }
  if (cfg_.privacy != PrivacyMode::kHe) {
    for (double& v : out.values) v *= weight;
  }
  out.privacy_seconds = seconds_since(t_priv) + pending_privacy_seconds_;
  return out;
}

FinalBody FederatedClient::finish(const BroadcastBody& final_state) {
  install(final_state);
  return {site_, evaluate(unflatten(global_, manifest_)), global_};
}

// ---------------------------------------------------------------------------
// Server

namespace {

struct Inbound {
  uint32_t client = 0;
  std::optional<Frame> frame;  // empty: the connection failed, see error
  std::string error;
  Clock::time_point at;
};

class ClientSet {
 public:
  explicit ClientSet(size_t n) : channels_(n) {}

  ~ClientSet() { stop(); }

  std::vector<std::unique_ptr<Channel>>& channels() { return channels_; }

  void start_readers() {
    for (uint32_t i = 0; i < channels_.size(); ++i) {
      readers_.emplace_back([this, i] {
        while (!stopping_) {
          try {
            auto f = channels_[i]->recv(milliseconds(100));
            if (f) inbox_.push({i, std::move(f), {}, Clock::now()});
          } catch (const Error& e) {
            if (!stopping_) inbox_.push({i, std::nullopt, e.what(), Clock::now()});
            return;
          }
        }
      });
    }
  }

  BlockingQueue<Inbound>& inbox() { return inbox_; }

  void broadcast(const Frame& f) {
    for (auto& ch : channels_) {
      if (ch) ch->send(f);
    }
  }

  void try_broadcast(const Frame& f) {
    for (auto& ch : channels_) {
      if (!ch) continue;
      try {
        ch->send(f);
      } catch (const Error&) {
      }
    }
  }

  void stop() {
    stopping_ = true;
    for (auto& ch : channels_) {
      if (ch) ch->close();
    }
    for (auto& t : readers_) t.join();
    readers_.clear();
    inbox_.close();
  }

 private:
  std::vector<std::unique_ptr<Channel>> channels_;
  std::vector<std::thread> readers_;
  BlockingQueue<Inbound> inbox_;
  std::atomic<bool> stopping_{false};
};

void reject(Channel& ch, const std::string& why) {
  try {
    ch.send({MsgType::kError, 0, encode_error(why)});
  } catch (const Error&) {
  }
  ch.close();
}

// Accepts connections until every configured site has joined.
void join_phase(const ExperimentConfig& cfg, Listener& listener, const std::string& token,
                ClientSet& clients, std::vector<uint64_t>& n_train) {
  const auto names = cfg.site_names();
  const auto deadline = Clock::now() + to_ms(cfg.transport.timeout_seconds);
  size_t joined = 0;
  while (joined < names.size()) {
    auto ch = listener.accept(remaining(deadline));
    if (!ch) {
      throw Error(ErrorKind::kTimeout, "only " + std::to_string(joined) + " of " +
                                           std::to_string(names.size()) + " clients joined in time");
    }
    std::optional<Frame> f;
    try {
      f = ch->recv(remaining(deadline));
    } catch (const Error&) {
      continue;  // connection failed before joining
    }
    if (!f) continue;
    if (f->type != MsgType::kJoin) {
      reject(*ch, "expected JOIN");
      continue;
    }
    JoinBody join;
    try {
      join = decode_join(f->body);
    } catch (const Error& e) {
      reject(*ch, e.what());
      continue;
    }
    if (join.token != token) {
      reject(*ch, "authentication failed");
      continue;
    }
    const auto it = std::find(names.begin(), names.end(), join.client_id);
    if (it == names.end()) {
      reject(*ch, "unknown site '" + join.client_id + "'");
      continue;
    }
    const auto idx = static_cast<uint32_t>(it - names.begin());
    if (clients.channels()[idx]) {
      reject(*ch, "site '" + join.client_id + "' already joined");
      continue;
    }
    if (join.config_fingerprint != cfg.fingerprint()) {
      reject(*ch, "configuration mismatch");
      continue;
    }
    ch->send({MsgType::kJoinAck, 0,
              encode(JoinAckBody{idx, static_cast<uint32_t>(cfg.rounds)})});
    clients.channels()[idx] = std::move(ch);
    n_train[idx] = join.n_train;
    ++joined;
  }
}

// Collects one frame of `type` for `round` from every client.
std::vector<Inbound> collect(ClientSet& clients, const std::vector<std::string>& names, MsgType type,
                             uint32_t round, Clock::time_point deadline) {
  std::vector<std::optional<Inbound>> got(names.size());
  size_t count = 0;
  while (count < names.size()) {
    Inbound in;
    const auto status = clients.inbox().pop(in, remaining(deadline));
    if (status != BlockingQueue<Inbound>::PopStatus::kOk) {
      std::string missing;
      for (size_t i = 0; i < names.size(); ++i) {
        if (!got[i]) missing += (missing.empty() ? "" : ", ") + names[i];
      }
      throw Error(ErrorKind::kTimeout, "round " + std::to_string(round) + ": no reply from " + missing);
    }
    const std::string& who = names[in.client];
    if (!in.frame) throw Error(ErrorKind::kIo, "client '" + who + "' disconnected: " + in.error);
    if (in.frame->type == MsgType::kError) {
      throw Error(ErrorKind::kProtocol, "client '" + who + "' failed: " + decode_error(in.frame->body));
    }
    if (in.frame->type != type || in.frame->round != round) {
      throw Error(ErrorKind::kProtocol, "client '" + who + "' sent " +
                                            std::string(to_string(in.frame->type)) + " for round " +
                                            std::to_string(in.frame->round));
    }
    if (got[in.client]) throw Error(ErrorKind::kProtocol, "client '" + who + "' replied twice");
    got[in.client] = std::move(in);
    ++count;
  }
  std::vector<Inbound> out;
  for (auto& g : got) out.push_back(std::move(*g));
  return out;
}

}  // namespace

ServerResult server_run(const ExperimentConfig& cfg, Listener& listener, const std::string& token) {
  const auto run_start = Clock::now();
  const auto names = cfg.site_names();
  const size_t n = names.size();
  const auto timeout = to_ms(cfg.transport.timeout_seconds);
  const LayoutManifest manifest = model_layout(cfg.model);

  ServerResult result;
  RunReport& report = result.report;
  report.method = cfg.method_name();
  report.learner = learner_label(cfg.model);
  report.config = cfg.to_json();
  report.environment = cfg.environment_json();
  report.initial_params = flatten(init_params(cfg.model, derive_seed(cfg.seed, {kInitStream}))).values;

  FlatVector global = report.initial_params;
  std::optional<ckks::ContextPtr> he_ctx;
  if (cfg.privacy == PrivacyMode::kHe) he_ctx = ckks::make_context(cfg.he->params);
  std::vector<std::vector<uint8_t>> encrypted_state;  // last encrypted aggregate

  ClientSet clients(n);
  std::vector<uint64_t> n_train(n, 0);
  try {
    join_phase(cfg, listener, token, clients, n_train);
    clients.start_readers();

    std::vector<double> weights(n, 1.0);
    if (cfg.weighting == Weighting::kExamples) {
      for (size_t i = 0; i < n; ++i) weights[i] = static_cast<double>(n_train[i]);
    }

    auto state_body = [&]() {
      BroadcastBody b;
      if (cfg.privacy == PrivacyMode::kHe && !encrypted_state.empty()) {
        b.kind = StateKind::kEncryptedUpdate;
        b.chunks = encrypted_state;
      } else {
        b.params = global;
      }
      return b;
    };

    for (uint32_t r = 0; r < cfg.rounds; ++r) {
      const BroadcastBody b = state_body();
      const auto t_broadcast = Clock::now();
      clients.broadcast({MsgType::kBroadcast, r, encode(b)});
      const auto replies = collect(clients, names, MsgType::kUpdate, r, t_broadcast + timeout);

      RoundRecord rec;
      rec.round = r;
      rec.broadcast_bytes = b.payload_bytes();
      std::vector<UpdateBody> updates;
      for (const auto& in : replies) {
        UpdateBody u = decode_update(in.frame->body);
        if (u.client_id != names[in.client] || u.mode != payload_mode(cfg.privacy)) {
          throw Error(ErrorKind::kProtocol, "malformed update from '" + names[in.client] + "'");
        }
        const double arrival = std::chrono::duration<double>(in.at - t_broadcast).count();
        result.events.push_back({FederationEvent::Kind::kArrival, r, in.client,
                                 std::chrono::duration<double>(in.at - run_start).count()});
        rec.clients.push_back({u.client_id, u.steps, u.pre, u.post, u.payload_bytes(), u.train_seconds,
                               u.privacy_seconds, arrival});
        updates.push_back(std::move(u));
      }

      const auto t_agg = Clock::now();
      result.events.push_back({FederationEvent::Kind::kAggregate, r, 0, seconds_since(run_start)});
      if (cfg.privacy == PrivacyMode::kHe) {
        std::vector<std::vector<ckks::Ciphertext>> cts;
        for (const auto& u : updates) cts.push_back(deserialize_all(**he_ctx, u.chunks));
        encrypted_state = serialize_all(**he_ctx, aggregate_encrypted(**he_ctx, cts, weights));
      } else {
        std::vector<FlatVector> values;
        for (auto& u : updates) values.push_back(std::move(u.values));
        const FlatVector delta = aggregate_plain(values, weights);
        if (delta.size() != global.size()) {
          throw Error(ErrorKind::kStructural, "update length does not match the model");
        }
        for (size_t i = 0; i < global.size(); ++i) global[i] += delta[i];
        if (!all_finite(global)) throw Error(ErrorKind::kState, "global model became non-finite");
      }
      rec.aggregation_seconds = seconds_since(t_agg);
      report.rounds.push_back(std::move(rec));
    }

    // Cross-site validation of the final global model, computed client-side.
    const auto final_round = static_cast<uint32_t>(cfg.rounds);
    clients.broadcast({MsgType::kRoundDone, final_round, encode(state_body())});
    const auto finals = collect(clients, names, MsgType::kRoundDone, final_round, Clock::now() + timeout);
    std::vector<EvalRow> rows;
    std::vector<FinalBody> bodies;
    for (const auto& in : finals) {
      FinalBody f = decode_final(in.frame->body);
      if (f.client_id != names[in.client]) {
        throw Error(ErrorKind::kProtocol, "malformed final reply from '" + names[in.client] + "'");
      }
      rows.push_back({f.client_id, f.metrics});
      bodies.push_back(std::move(f));
    }
    for (const auto& f : bodies) {
      if (f.final_params != bodies.front().final_params) {
        throw Error(ErrorKind::kProtocol, "clients disagree on the final global model");
      }
    }
    if (cfg.privacy == PrivacyMode::kHe) global = bodies.front().final_params;
    report.evaluation = make_eval_table("cross_site", std::move(rows));
    report.final_params = global;
    clients.broadcast({MsgType::kShutdown, final_round, {}});
  } catch (const Error& e) {
    report.aborted = true;
    report.abort_reason = e.what();
    if (cfg.privacy != PrivacyMode::kHe) report.final_params = global;
    clients.try_broadcast({MsgType::kError, 0, encode_error(e.what())});
  }
  clients.stop();
  report.wall_seconds = seconds_since(run_start);
  return result;
}

void client_run(const ExperimentConfig& cfg, const std::string& site, Split data, Channel& channel,
                const std::string& token) {
  struct CloseOnExit {
    Channel& ch;
    ~CloseOnExit() { ch.close(); }
  } guard{channel};

  const auto timeout = to_ms(cfg.transport.timeout_seconds);
  auto expect = [&](const char* what) {
    auto f = channel.recv(timeout);
    if (!f) throw Error(ErrorKind::kTimeout, std::string("timed out waiting for ") + what);
    return std::move(*f);
  };

  channel.send({MsgType::kJoin, 0,
                encode(JoinBody{token, site, data.train.size(), cfg.fingerprint()})});
  const Frame ack_frame = expect("JOIN_ACK");
  if (ack_frame.type == MsgType::kError) {
    throw Error(ErrorKind::kAuth, "server rejected the client: " + decode_error(ack_frame.body));
  }
  if (ack_frame.type != MsgType::kJoinAck) throw Error(ErrorKind::kProtocol, "expected JOIN_ACK");
  const JoinAckBody ack = decode_join_ack(ack_frame.body);

  FederatedClient client(cfg, site, ack.client_index, std::move(data));
  uint32_t next_round = 0;
  while (true) {
    const Frame f = expect("the server");
    switch (f.type) {
      case MsgType::kBroadcast: {
        if (f.round != next_round || f.round >= ack.total_rounds) {
          throw Error(ErrorKind::kProtocol, "unexpected broadcast for round " + std::to_string(f.round));
        }
        const UpdateBody u = client.execute_round(f.round, decode_broadcast(f.body));
        channel.send({MsgType::kUpdate, f.round, encode(u)});
        ++next_round;
        break;
      }
      case MsgType::kRoundDone: {
        if (f.round != ack.total_rounds || next_round != ack.total_rounds) {
          throw Error(ErrorKind::kProtocol, "unexpected ROUND_DONE");
        }
        channel.send({MsgType::kRoundDone, f.round, encode(client.finish(decode_broadcast(f.body)))});
        break;
      }
      case MsgType::kShutdown:
        return;
      case MsgType::kError:
        throw Error(ErrorKind::kProtocol, "server aborted the run: " + decode_error(f.body));
      default:
        throw Error(ErrorKind::kProtocol, "unexpected " + std::string(to_string(f.type)) + " frame");
    }
  }
}

ServerResult run_simulation(const ExperimentConfig& cfg) {
  SimNetwork net;
  auto listener = net.listen();
  const std::string token = "simulation";
  const auto names = cfg.site_names();

  std::vector<std::thread> threads;
  for (const auto& site : names) {
    std::shared_ptr<Channel> ch = net.connect();
    threads.emplace_back([&cfg, site, ch, &token] {
      // Failures surface on the server as an ERROR frame or a closed channel.
      try {
        client_run(cfg, site, load_site(cfg, site), *ch, token);
      } catch (const std::exception& e) {
        try {
          ch->send({MsgType::kError, 0, encode_error(e.what())});
        } catch (const Error&) {
        }
        ch->close();
      }
    });
  }
  ServerResult result = server_run(cfg, *listener, token);
  for (auto& t : threads) t.join();
  return result;
}

}  // namespace privfed
