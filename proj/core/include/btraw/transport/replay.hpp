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
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "btraw/pklog/record.hpp"
#include "btraw/transport/transport.hpp"

namespace btraw::transport {

/// Plays the inbound side of a capture back to the host. Event and
/// ACL-received records become H4 frames again; sends are counted and
/// dropped. Default pacing is as fast as possible; recorded pacing sleeps
/// out the captured timestamp deltas on a background thread.
class ReplayTransport : public TransportSession {
 public:
  ReplayTransport(const std::string& capture_path, bool recorded_pacing);
  ~ReplayTransport() override;

  void send(std::span<const uint8_t> h4_frame) override;
  void set_frame_sink(FrameSink sink) override;
  bool is_up() const override;
  void close() override;
  bool is_synchronous() const override { return !recorded_pacing_; }

  std::size_t dropped_sends() const { return dropped_sends_; }

  /// The frames the capture will replay, in order. Exposed so fidelity
  /// checks can compare against a live session's inbound sequence.
  static std::vector<std::vector<uint8_t>> inbound_frames(
      std::span<const pklog::LogRecord> records);

 private:
  void pace_loop();
  void deliver(std::size_t index);

  bool recorded_pacing_ = false;
  std::vector<std::vector<uint8_t>> frames_;
  std::vector<pklog::LogTimestamp> stamps_;
  std::atomic<bool> up_{true};
  std::atomic<std::size_t> dropped_sends_{0};
  std::thread pacer_;
  std::mutex state_mutex_;
  FrameSink sink_;
  std::size_t delivered_ = 0;
};

}  // namespace btraw::transport
