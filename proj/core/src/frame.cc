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

#include "privfed/frame.h"

#include <cstring>

#include "privfed/error.h"

namespace privfed {
namespace {

constexpr uint8_t kMagic[4] = {'P', 'F', 'D', '1'};

}  // namespace

std::string_view to_string(MsgType type) {
  switch (type) {
    case MsgType::kJoin: return "JOIN";
    case MsgType::kJoinAck: return "JOIN_ACK";
    case MsgType::kBroadcast: return "BROADCAST";
    case MsgType::kUpdate: return "UPDATE";
    case MsgType::kRoundDone: return "ROUND_DONE";
    case MsgType::kShutdown: return "SHUTDOWN";
    case MsgType::kError: return "ERROR";
  }
  return "UNKNOWN";
}

std::vector<uint8_t> encode_frame(const Frame& frame) {
  if (frame.body.size() > kMaxFrameBody) throw Error(ErrorKind::kCapacity, "frame body exceeds 256 MiB");
  std::vector<uint8_t> out(kFrameHeaderBytes + frame.body.size());
  std::memcpy(out.data(), kMagic, 4);
  out[4] = static_cast<uint8_t>(frame.type);
  for (int i = 0; i < 4; ++i) out[5 + i] = static_cast<uint8_t>(frame.round >> (8 * i));
  const uint64_t len = frame.body.size();
  for (int i = 0; i < 8; ++i) out[9 + i] = static_cast<uint8_t>(len >> (8 * i));
  if (len > 0) std::memcpy(out.data() + kFrameHeaderBytes, frame.body.data(), len);
  return out;
}

FrameHeader decode_header(std::span<const uint8_t> header) {
  if (header.size() < kFrameHeaderBytes) throw Error(ErrorKind::kDecode, "truncated frame header");
  if (std::memcmp(header.data(), kMagic, 4) != 0) throw Error(ErrorKind::kDecode, "bad frame magic");
  const uint8_t type = header[4];
  if (type > static_cast<uint8_t>(MsgType::kError)) {
    throw Error(ErrorKind::kDecode, "unknown message type " + std::to_string(type));
  }
  FrameHeader h{static_cast<MsgType>(type), 0, 0};
  for (int i = 0; i < 4; ++i) h.round |= static_cast<uint32_t>(header[5 + i]) << (8 * i);
  for (int i = 0; i < 8; ++i) h.body_len |= static_cast<uint64_t>(header[9 + i]) << (8 * i);
  if (h.body_len > kMaxFrameBody) throw Error(ErrorKind::kDecode, "frame body exceeds 256 MiB");
  return h;
}

Frame decode_frame(std::span<const uint8_t> bytes) {
  const FrameHeader h = decode_header(bytes);
  if (bytes.size() - kFrameHeaderBytes != h.body_len) {
    throw Error(ErrorKind::kDecode, bytes.size() - kFrameHeaderBytes < h.body_len
                                        ? "truncated frame body"
                                        : "trailing bytes after frame body");
  }
  return {h.type, h.round, std::vector<uint8_t>(bytes.begin() + kFrameHeaderBytes, bytes.end())};
}

}  // namespace privfed
