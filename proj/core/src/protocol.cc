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

#include "privfed/protocol.h"

#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

#include "privfed/error.h"

namespace privfed {
namespace {

using nlohmann::json;

class Writer {
 public:
  void u8(uint8_t v) { out_.push_back(v); }
  void u32(uint32_t v) { le(v, 4); }
  void u64(uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<uint64_t>(v), 8); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void f64s(const FlatVector& v) {
    u32(static_cast<uint32_t>(v.size()));
    for (double x : v) f64(x);
  }
  void blobs(const std::vector<std::vector<uint8_t>>& bs) {
    u32(static_cast<uint32_t>(bs.size()));
    for (const auto& b : bs) {
      u64(b.size());
      out_.insert(out_.end(), b.begin(), b.end());
    }
  }
  void metrics(const MetricSet& m) {
    f64(m.auc);
    f64(m.sensitivity);
    f64(m.specificity);
    u64(m.n_pos);
    u64(m.n_neg);
    f64(m.threshold);
  }
  std::vector<uint8_t> take() { return std::move(out_); }

 private:
  void le(uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  std::vector<uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> in) : in_(in) {}

  uint8_t u8() { return static_cast<uint8_t>(le(1)); }
  uint32_t u32() { return static_cast<uint32_t>(le(4)); }
  uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string str() {
    const uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  FlatVector f64s() {
    const uint32_t n = u32();
    need(uint64_t{n} * 8);
    FlatVector v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  std::vector<std::vector<uint8_t>> blobs() {
    const uint32_t n = u32();
    std::vector<std::vector<uint8_t>> out;
    for (uint32_t i = 0; i < n; ++i) {
      const uint64_t len = u64();
      need(len);
      out.emplace_back(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                       in_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
      pos_ += len;
    }
    return out;
  }
  MetricSet metrics() {
    MetricSet m;
    m.auc = f64();
    m.sensitivity = f64();
    m.specificity = f64();
    m.n_pos = u64();
    m.n_neg = u64();
    m.threshold = f64();
    return m;
  }
  void finish() const {
    if (pos_ != in_.size()) throw Error(ErrorKind::kDecode, "trailing bytes in message body");
  }

 private:
  void need(uint64_t n) const {
    if (n > in_.size() - pos_) throw Error(ErrorKind::kDecode, "truncated message body");
  }
  uint64_t le(int bytes) {
    need(static_cast<uint64_t>(bytes));
    uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<size_t>(bytes);
    return v;
  }

  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

std::vector<uint8_t> json_bytes(const json& j) {
  const std::string s = j.dump();
  return {s.begin(), s.end()};
}

json parse_json(std::span<const uint8_t> bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kDecode, std::string("malformed JSON body: ") + e.what());
  }
}

uint64_t blob_bytes(const std::vector<std::vector<uint8_t>>& chunks) {
  uint64_t n = 0;
  for (const auto& c : chunks) n += c.size();
  return n;
}

}  // namespace

uint64_t BroadcastBody::payload_bytes() const {
  return kind == StateKind::kParams ? params.size() * sizeof(double) : blob_bytes(chunks);
}

uint64_t UpdateBody::payload_bytes() const {
  return mode == PayloadMode::kHe ? blob_bytes(chunks) : values.size() * sizeof(double);
}

std::vector<uint8_t> encode(const JoinBody& body) {
  return json_bytes({{"token", body.token},
                     {"client_id", body.client_id},
                     {"n_train", body.n_train},
                     {"config_fingerprint", body.config_fingerprint}});
}

std::vector<uint8_t> encode(const JoinAckBody& body) {
  return json_bytes({{"client_index", body.client_index}, {"total_rounds", body.total_rounds}});
}

std::vector<uint8_t> encode(const BroadcastBody& body) {
  Writer w;
  w.u8(static_cast<uint8_t>(body.kind));
  if (body.kind == StateKind::kParams) {
    w.f64s(body.params);
  } else {
    w.blobs(body.chunks);
  }
  return w.take();
}

std::vector<uint8_t> encode(const UpdateBody& body) {
  Writer w;
  w.str(body.client_id);
  w.u32(body.steps);
  w.u8(static_cast<uint8_t>(body.mode));
  if (body.mode == PayloadMode::kHe) {
    w.blobs(body.chunks);
  } else {
    w.f64s(body.values);
  }
  w.f64(body.train_seconds);
  w.f64(body.privacy_seconds);
  w.metrics(body.pre);
  w.metrics(body.post);
  return w.take();
}

std::vector<uint8_t> encode(const FinalBody& body) {
  Writer w;
  w.str(body.client_id);
  w.metrics(body.metrics);
  w.f64s(body.final_params);
  return w.take();
}

std::vector<uint8_t> encode_error(const std::string& message) { return {message.begin(), message.end()}; }

JoinBody decode_join(std::span<const uint8_t> bytes) {
  const json j = parse_json(bytes);
  try {
    return {j.at("token").get<std::string>(), j.at("client_id").get<std::string>(),
            j.at("n_train").get<uint64_t>(), j.at("config_fingerprint").get<uint64_t>()};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kDecode, std::string("malformed JOIN body: ") + e.what());
  }
}

JoinAckBody decode_join_ack(std::span<const uint8_t> bytes) {
  const json j = parse_json(bytes);
  try {
    return {j.at("client_index").get<uint32_t>(), j.at("total_rounds").get<uint32_t>()};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kDecode, std::string("malformed JOIN_ACK body: ") + e.what());
  }
}

BroadcastBody decode_broadcast(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  BroadcastBody b;
  const uint8_t kind = r.u8();
  if (kind > 1) throw Error(ErrorKind::kDecode, "unknown broadcast kind");
  b.kind = static_cast<StateKind>(kind);
  if (b.kind == StateKind::kParams) {
    b.params = r.f64s();
  } else {
    b.chunks = r.blobs();
  }
  r.finish();
  return b;
}

UpdateBody decode_update(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  UpdateBody u;
  u.client_id = r.str();
  u.steps = r.u32();
  const uint8_t mode = r.u8();
  if (mode > 2) throw Error(ErrorKind::kDecode, "unknown payload mode");
  u.mode = static_cast<PayloadMode>(mode);
  if (u.mode == PayloadMode::kHe) {
    u.chunks = r.blobs();
  } else {
    u.values = r.f64s();
  }
  u.train_seconds = r.f64();
  u.privacy_seconds = r.f64();
  u.pre = r.metrics();
  u.post = r.metrics();
  r.finish();
  return u;
}

FinalBody decode_final(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  FinalBody f;
  f.client_id = r.str();
  f.metrics = r.metrics();
  f.final_params = r.f64s();
  r.finish();
  return f;
}

std::string decode_error(std::span<const uint8_t> bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

}  // namespace privfed
