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

#include "privfed/channel.h"

#include "privfed/error.h"

namespace privfed {
namespace {

using Bytes = std::vector<uint8_t>;

struct Pipe {
  BlockingQueue<Bytes> queue;
};

class SimChannel : public Channel {
 public:
  SimChannel(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~SimChannel() override { close(); }

  void send(const Frame& frame) override {
    if (!out_->queue.push(encode_frame(frame))) throw Error(ErrorKind::kIo, "sim channel closed");
  }

  std::optional<Frame> recv(std::chrono::milliseconds timeout) override {
    Bytes bytes;
    switch (in_->queue.pop(bytes, timeout)) {
      case BlockingQueue<Bytes>::PopStatus::kTimeout:
        return std::nullopt;
      case BlockingQueue<Bytes>::PopStatus::kClosed:
        throw Error(ErrorKind::kIo, "sim channel closed by peer");
      case BlockingQueue<Bytes>::PopStatus::kOk:
        break;
    }
    try {
      return decode_frame(bytes);
    } catch (const Error&) {
      close();
      throw;
    }
  }

  void close() override {
    in_->queue.close();
    out_->queue.close();
  }

 private:
  std::shared_ptr<Pipe> in_;
  std::shared_ptr<Pipe> out_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_sim_pair() {
  auto a_to_b = std::make_shared<Pipe>();
  auto b_to_a = std::make_shared<Pipe>();
  return {std::make_unique<SimChannel>(b_to_a, a_to_b), std::make_unique<SimChannel>(a_to_b, b_to_a)};
}

struct SimNetwork::State {
  BlockingQueue<std::unique_ptr<Channel>> pending;
};

namespace {

class SimListener : public Listener {
 public:
  explicit SimListener(std::shared_ptr<void> keep, BlockingQueue<std::unique_ptr<Channel>>* pending)
      : keep_(std::move(keep)), pending_(pending) {}

  std::unique_ptr<Channel> accept(std::chrono::milliseconds timeout) override {
    std::unique_ptr<Channel> ch;
    if (pending_->pop(ch, timeout) != BlockingQueue<std::unique_ptr<Channel>>::PopStatus::kOk) {
      return nullptr;
    }
    return ch;
  }

 private:
  std::shared_ptr<void> keep_;
  BlockingQueue<std::unique_ptr<Channel>>* pending_;
};

}  // namespace

SimNetwork::SimNetwork() : state_(std::make_shared<State>()) {}

std::unique_ptr<Listener> SimNetwork::listen() {
  return std::make_unique<SimListener>(state_, &state_->pending);
}

std::unique_ptr<Channel> SimNetwork::connect() {
  auto [server_end, client_end] = make_sim_pair();
  if (!state_->pending.push(std::move(server_end))) throw Error(ErrorKind::kIo, "sim network closed");
  return std::move(client_end);
}

}  // namespace privfed
