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

#ifndef PRIVFED_ERROR_H_
#define PRIVFED_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace privfed {

enum class ErrorKind {
  kStructural,      // layout or length mismatch
  kInput,           // invalid argument value
  kConfiguration,   // invalid parameters or config file
  kCapacity,        // too many values for the container
  kState,           // operation not legal in the current state
  kDepthExhausted,  // no modulus level left to rescale into
  kDecode,          // malformed bytes
  kProtocol,        // unexpected message for the protocol state
  kAuth,            // join token rejected
  kTimeout,
  kParse,           // CSV or text input
  kSplit,           // dataset cannot be split as requested
  kMetric,          // metric undefined for the input
  kIo,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported with this exception type; callers that
// need to branch on the failure class inspect kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace privfed

#endif  // PRIVFED_ERROR_H_
