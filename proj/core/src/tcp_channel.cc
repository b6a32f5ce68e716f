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

#include "privfed/tcp_channel.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <mutex>
#include <thread>

#include "privfed/error.h"

namespace privfed {
namespace {

using Clock = std::chrono::steady_clock;

std::string errno_text() { return std::strerror(errno); }

// Waits until fd is readable; false on timeout.
bool wait_readable(int fd, std::chrono::milliseconds timeout) {
  pollfd p{fd, POLLIN, 0};
  while (true) {
    const int rc = ::poll(&p, 1, static_cast<int>(std::min<int64_t>(timeout.count(), INT32_MAX)));
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno != EINTR) throw Error(ErrorKind::kIo, "poll failed: " + errno_text());
  }
}

class TcpChannel : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpChannel() override {
    close();
    ::close(fd_);
  }

  void send(const Frame& frame) override {
    const auto bytes = encode_frame(frame);
    std::lock_guard lock(send_mu_);
    size_t sent = 0;
    while (sent < bytes.size()) {
      const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorKind::kIo, "send failed: " + errno_text());
      }
      sent += static_cast<size_t>(n);
    }
  }

  std::optional<Frame> recv(std::chrono::milliseconds timeout) override {
    if (closed_) throw Error(ErrorKind::kIo, "tcp channel closed");
    if (!wait_readable(fd_, timeout)) return std::nullopt;
    // Once a frame has started, the rest must arrive within the same timeout.
    const auto deadline = Clock::now() + timeout;
    uint8_t header[kFrameHeaderBytes];
    read_exact(header, sizeof(header), deadline);
    FrameHeader h;
    try {
      h = decode_header(header);
    } catch (const Error&) {
      close();
      throw;
    }
    Frame frame{h.type, h.round, std::vector<uint8_t>(h.body_len)};
    read_exact(frame.body.data(), frame.body.size(), deadline);
    return frame;
  }

  void close() override {
    if (!closed_.exchange(true)) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  void read_exact(uint8_t* dst, size_t len, Clock::time_point deadline) {
    size_t got = 0;
    while (got < len) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0 || !wait_readable(fd_, left)) {
        close();
        throw Error(ErrorKind::kTimeout, "timed out inside a frame");
      }
      const ssize_t n = ::recv(fd_, dst + got, len - got, 0);
      if (n == 0) {
        close();
        throw Error(ErrorKind::kIo, "connection closed by peer");
      }
      if (n < 0) {
        if (errno == EINTR) continue;
        close();
        throw Error(ErrorKind::kIo, "recv failed: " + errno_text());
      }
      got += static_cast<size_t>(n);
    }
  }

  int fd_;
  std::mutex send_mu_;
  std::atomic<bool> closed_{false};
};

addrinfo* resolve(const HostPort& address, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(address.port);
  const int rc = ::getaddrinfo(address.host.empty() ? nullptr : address.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) throw Error(ErrorKind::kIo, "cannot resolve " + address.host + ": " + gai_strerror(rc));
  return res;
}

}  // namespace

HostPort parse_host_port(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorKind::kConfiguration, "expected HOST:PORT, got '" + text + "'");
  HostPort hp;
  hp.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535) {
    throw Error(ErrorKind::kConfiguration, "invalid port in '" + text + "'");
  }
  hp.port = static_cast<uint16_t>(value);
  return hp;
}

TcpListener::TcpListener(const HostPort& address) {
  addrinfo* res = resolve(address, true);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    ::freeaddrinfo(res);
    throw Error(ErrorKind::kIo, "socket failed: " + errno_text());
  }
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd_, res->ai_addr, res->ai_addrlen) != 0 || ::listen(fd_, 64) != 0) {
    const std::string why = errno_text();
    ::freeaddrinfo(res);
    ::close(fd_);
    throw Error(ErrorKind::kIo, "cannot listen on " + address.host + ":" + std::to_string(address.port) + ": " + why);
  }
  ::freeaddrinfo(res);
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> TcpListener::accept(std::chrono::milliseconds timeout) {
  if (!wait_readable(fd_, timeout)) return nullptr;
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw Error(ErrorKind::kIo, "accept failed: " + errno_text());
  return std::make_unique<TcpChannel>(fd);
}

std::unique_ptr<Channel> tcp_connect(const HostPort& address, std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  std::string last_error;
  while (true) {
    addrinfo* res = resolve(address, false);
    const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
      ::freeaddrinfo(res);
      return std::make_unique<TcpChannel>(fd);
    }
    last_error = errno_text();
    if (fd >= 0) ::close(fd);
    ::freeaddrinfo(res);
    if (Clock::now() >= deadline) {
      throw Error(ErrorKind::kIo, "cannot connect to " + address.host + ":" + std::to_string(address.port) +
                                      ": " + last_error);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
}

}  // namespace privfed
