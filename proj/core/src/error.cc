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

#include "privfed/error.h"

namespace privfed {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kStructural: return "structural error";
    case ErrorKind::kInput: return "input error";
    case ErrorKind::kConfiguration: return "configuration error";
    case ErrorKind::kCapacity: return "capacity error";
    case ErrorKind::kState: return "state error";
    case ErrorKind::kDepthExhausted: return "depth exhausted";
    case ErrorKind::kDecode: return "decode error";
    case ErrorKind::kProtocol: return "protocol error";
    case ErrorKind::kAuth: return "authentication error";
    case ErrorKind::kTimeout: return "timeout";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kSplit: return "split error";
    case ErrorKind::kMetric: return "metric error";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

}  // namespace privfed
