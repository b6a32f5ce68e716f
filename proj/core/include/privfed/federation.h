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

#ifndef PRIVFED_FEDERATION_H_
#define PRIVFED_FEDERATION_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "privfed/channel.h"
#include "privfed/ckks/ckks.h"
#include "privfed/config.h"
#include "privfed/protocol.h"
#include "privfed/report.h"

namespace privfed {

// Seed stream identifiers, combined with the run seed via derive_seed.
inline constexpr uint64_t kInitStream = 1;
inline constexpr uint64_t kTrainStream = 2;
inline constexpr uint64_t kDpStream = 3;
inline constexpr uint64_t kHeStream = 4;

// Shared CKKS material derived from privacy.he.key_seed. Clients hold the
// key pair; the server only needs the context.
struct HeMaterial {
  ckks::ContextPtr context;
  ckks::KeyPair keys;
};

HeMaterial make_he_material(const HeConfig& cfg);

class FederatedClient {
 public:
  FederatedClient(const ExperimentConfig& cfg, std::string site, uint32_t index, Split data);

  // One round: install the broadcast, evaluate, train, evaluate, and build
  // the privacy-protected update.
  UpdateBody execute_round(uint32_t round, const BroadcastBody& incoming);

  // Installs the final state and evaluates it on the validation split.
  FinalBody finish(const BroadcastBody& final_state);

  const FlatVector& global_params() const { return global_; }
  const std::string& site() const { return site_; }
  size_t n_train() const { return data_.train.size(); }

 private:
  void install(const BroadcastBody& incoming);
  MetricSet evaluate(const ParamSet& params) const;

  const ExperimentConfig& cfg_;
  std::string site_;
  uint32_t index_;
  Split data_;
  LayoutManifest manifest_;
  FlatVector global_;
  bool installed_ = false;
  double pending_privacy_seconds_ = 0.0;
  std::optional<HeMaterial> he_;
};

struct FederationEvent {
  enum class Kind { kArrival, kAggregate };
  Kind kind;
  uint32_t round;
  uint32_t client;  // unused for kAggregate
  double seconds;   // since the run started
};

struct ServerResult {
  RunReport report;
  std::vector<FederationEvent> events;
};

// Waits for one client per configured site, runs cfg.rounds rounds and the
// final cross-site validation. Timeouts, disconnects and protocol violations
// produce an aborted (partial) report instead of throwing.
ServerResult server_run(const ExperimentConfig& cfg, Listener& listener, const std::string& token);

// Client role over an established channel. Throws on rejection or protocol
// errors; returns normally after SHUTDOWN.
void client_run(const ExperimentConfig& cfg, const std::string& site, Split data, Channel& channel,
                const std::string& token);

// Server plus one thread per site in this process, over in-memory channels.
ServerResult run_simulation(const ExperimentConfig& cfg);

}  // namespace privfed

#endif  // PRIVFED_FEDERATION_H_
