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

#ifndef PRIVFED_PROTOCOL_H_
#define PRIVFED_PROTOCOL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "privfed/metrics.h"
#include "privfed/params.h"

namespace privfed {

// Message bodies carried inside frames. JOIN / JOIN_ACK / ERROR bodies are
// JSON text; the rest are little-endian binary.

struct JoinBody {
  std::string token;
  std::string client_id;  // site name
  uint64_t n_train = 0;
  uint64_t config_fingerprint = 0;
};

struct JoinAckBody {
  uint32_t client_index = 0;
  uint32_t total_rounds = 0;
};

// Global state sent to clients. kParams carries plaintext parameters;
// kEncryptedUpdate carries the encrypted aggregate of the previous round,
// which clients decrypt and add to their copy of the global model.
enum class StateKind : uint8_t { kParams = 0, kEncryptedUpdate = 1 };

struct BroadcastBody {
  StateKind kind = StateKind::kParams;
  FlatVector params;
  std::vector<std::vector<uint8_t>> chunks;  // serialized ciphertexts

  uint64_t payload_bytes() const;
};

enum class PayloadMode : uint8_t { kPlain = 0, kDp = 1, kHe = 2 };

struct UpdateBody {
  std::string client_id;
  uint32_t steps = 0;
  PayloadMode mode = PayloadMode::kPlain;
  FlatVector values;                         // plain and DP payloads
  std::vector<std::vector<uint8_t>> chunks;  // HE payload
  double train_seconds = 0.0;
  double privacy_seconds = 0.0;
  MetricSet pre;
  MetricSet post;

  uint64_t payload_bytes() const;
};

// Client's answer to the final ROUND_DONE: cross-site validation of the final
// global model on its validation split.
struct FinalBody {
  std::string client_id;
  MetricSet metrics;
  FlatVector final_params;
};

std::vector<uint8_t> encode(const JoinBody& body);
std::vector<uint8_t> encode(const JoinAckBody& body);
std::vector<uint8_t> encode(const BroadcastBody& body);
std::vector<uint8_t> encode(const UpdateBody& body);
std::vector<uint8_t> encode(const FinalBody& body);
std::vector<uint8_t> encode_error(const std::string& message);

// Decoders throw kDecode on malformed or trailing bytes.
JoinBody decode_join(std::span<const uint8_t> bytes);
JoinAckBody decode_join_ack(std::span<const uint8_t> bytes);
BroadcastBody decode_broadcast(std::span<const uint8_t> bytes);
UpdateBody decode_update(std::span<const uint8_t> bytes);
FinalBody decode_final(std::span<const uint8_t> bytes);
std::string decode_error(std::span<const uint8_t> bytes);

}  // namespace privfed

#endif  // PRIVFED_PROTOCOL_H_
