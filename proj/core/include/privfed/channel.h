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

#ifndef PRIVFED_CHANNEL_H_
#define PRIVFED_CHANNEL_H_

#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>

#include "privfed/frame.h"

namespace privfed {

// Ordered, reliable, bidirectional frame stream. send() may be called
// concurrently with recv() from another thread.
class Channel {
 public:
  virtual ~Channel() = default;

  virtual void send(const Frame& frame) = 0;
  // nullopt on timeout; throws kIo once the peer has closed and nothing is
  // buffered, kDecode on malformed input (the channel is then closed).
  virtual std::optional<Frame> recv(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
};

class Listener {
 public:
  virtual ~Listener() = default;
  // nullptr on timeout.
  virtual std::unique_ptr<Channel> accept(std::chrono::milliseconds timeout) = 0;
};

template <typename T>
class BlockingQueue {
 public:
  // Returns false if the queue was closed.
  bool push(T value) {
    {
      std::lock_guard lock(mu_);
      if (closed_) return false;
      items_.push_back(std::move(value));
    }
    cv_.notify_one();
    return true;
  }

  enum class PopStatus { kOk, kTimeout, kClosed };

  PopStatus pop(T& out, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_for(lock, timeout, [&] { return !items_.empty() || closed_; })) {
      return PopStatus::kTimeout;
    }
    if (items_.empty()) return PopStatus::kClosed;
    out = std::move(items_.front());
    items_.pop_front();
    return PopStatus::kOk;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<T> items_;
  bool closed_ = false;
};

// In-process transport. Frames cross the channel in encoded form so that the
// simulated path exercises the same codec as TCP.
class SimNetwork {
 public:
  SimNetwork();

  std::unique_ptr<Listener> listen();
  std::unique_ptr<Channel> connect();

 private:
  struct State;
  std::shared_ptr<State> state_;
};

// A connected pair of in-process channel ends.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_sim_pair();

}  // namespace privfed

#endif  // PRIVFED_CHANNEL_H_
