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

#ifndef PRIVFED_FRAME_H_
#define PRIVFED_FRAME_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace privfed {

enum class MsgType : uint8_t {
  kJoin = 0,
  kJoinAck = 1,
  kBroadcast = 2,
  kUpdate = 3,
  kRoundDone = 4,
  kShutdown = 5,
  kError = 6,
};

std::string_view to_string(MsgType type);

// Wire layout, little-endian: magic "PFD1" | type u8 | round u32 |
// body_len u64 | body.
struct Frame {
  MsgType type = MsgType::kShutdown;
  uint32_t round = 0;
  std::vector<uint8_t> body;

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr size_t kFrameHeaderBytes = 17;
inline constexpr uint64_t kMaxFrameBody = uint64_t{256} << 20;

struct FrameHeader {
  MsgType type;
  uint32_t round;
  uint64_t body_len;
};

std::vector<uint8_t> encode_frame(const Frame& frame);

// Validates magic, type and body length. Throws kDecode.
FrameHeader decode_header(std::span<const uint8_t> header);

// Decodes exactly one frame occupying the whole buffer. Throws kDecode.
Frame decode_frame(std::span<const uint8_t> bytes);

}  // namespace privfed

#endif  // PRIVFED_FRAME_H_
