/*
 * Copyright 2025 The btraw Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "btraw/hci/h4.hpp"
#include "btraw/sim/profile.hpp"
#include "btraw/transport/transport.hpp"

namespace btraw::transport {

/// Serves simulated controllers over a TCP byte stream speaking raw H4
/// frames. Each accepted connection gets a fresh controller built from the
/// same profile, so transcripts are reproducible per connection.
class StreamServer {
 public:
  /// Binds and starts accepting. Port 0 picks an ephemeral port.
  explicit StreamServer(sim::ControllerProfile profile, uint16_t port = 0);
  ~StreamServer();

  StreamServer(const StreamServer&) = delete;
  StreamServer& operator=(const StreamServer&) = delete;

  uint16_t port() const { return port_; }
  std::string address() const;
  void stop();

 private:
  void accept_loop();
  void serve_connection(int fd);

  sim::ControllerProfile profile_;
  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::mutex workers_mutex_;
  std::vector<std::thread> workers_;
  std::vector<int> worker_fds_;
};

/// Client endpoint of the framed-stream backend: H4 frames over a
/// connected TCP socket, reassembled packet-atomically on receive.
class StreamTransport : public TransportSession {
 public:
  /// Connects to "host:port". Throws BadConfigError on a malformed
  /// address and BackendUnavailableError when the endpoint is unreachable.
  explicit StreamTransport(const std::string& address);
  ~StreamTransport() override;

  void send(std::span<const uint8_t> h4_frame) override;
  void set_frame_sink(FrameSink sink) override;
  bool is_up() const override;
  void close() override;

 private:
  void reader_loop();
  void deliver(std::vector<uint8_t> frame);

  int fd_ = -1;
  std::atomic<bool> up_{false};
  std::thread reader_;
  std::mutex write_mutex_;
  mutable std::mutex state_mutex_;
  FrameSink sink_;
  std::vector<std::vector<uint8_t>> backlog_;
};

}  // namespace btraw::transport
