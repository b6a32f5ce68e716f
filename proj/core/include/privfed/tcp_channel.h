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

#ifndef PRIVFED_TCP_CHANNEL_H_
#define PRIVFED_TCP_CHANNEL_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "privfed/channel.h"

namespace privfed {

struct HostPort {
  std::string host;
  uint16_t port = 0;
};

// Parses "host:port". Throws kConfiguration.
HostPort parse_host_port(const std::string& text);

class TcpListener : public Listener {
 public:
  // Port 0 binds an ephemeral port; see port().
  explicit TcpListener(const HostPort& address);
  ~TcpListener() override;
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  uint16_t port() const { return port_; }
  std::unique_ptr<Channel> accept(std::chrono::milliseconds timeout) override;

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

// Connects with retries until `timeout` elapses. Throws kIo.
std::unique_ptr<Channel> tcp_connect(const HostPort& address, std::chrono::milliseconds timeout);

}  // namespace privfed

#endif  // PRIVFED_TCP_CHANNEL_H_
