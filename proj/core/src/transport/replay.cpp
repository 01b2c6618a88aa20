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

#include "btraw/transport/replay.hpp"

#include <chrono>
#include <filesystem>

#include "btraw/hci/h4.hpp"
#include "btraw/pklog/capture.hpp"

namespace btraw::transport {
namespace {

int64_t micros_of(pklog::LogTimestamp ts) {
  return static_cast<int64_t>(ts.seconds) * 1'000'000 + ts.microseconds;
}

}  // namespace

std::vector<std::vector<uint8_t>> ReplayTransport::inbound_frames(
    std::span<const pklog::LogRecord> records) {
  std::vector<std::vector<uint8_t>> frames;
  for (const auto& record : records) {
    // Inbound records carry the unframed wire packet as their payload.
    if (record.kind == pklog::RecordKind::kEvent) {
      std::vector<uint8_t> frame;
      frame.reserve(1 + record.payload.size());
      frame.push_back(hci::kIndicatorEvent);
      frame.insert(frame.end(), record.payload.begin(), record.payload.end());
      frames.push_back(std::move(frame));
    } else if (record.kind == pklog::RecordKind::kAclReceived) {
      std::vector<uint8_t> frame;
      frame.reserve(1 + record.payload.size());
      frame.push_back(hci::kIndicatorAclData);
      frame.insert(frame.end(), record.payload.begin(), record.payload.end());
      frames.push_back(std::move(frame));
    }
  }
  return frames;
}

ReplayTransport::ReplayTransport(const std::string& capture_path,
                                 bool recorded_pacing)
    : recorded_pacing_(recorded_pacing) {
  if (!std::filesystem::exists(capture_path)) {
    throw BackendUnavailableError("replay capture not found: " + capture_path);
  }
  const auto result = pklog::read_capture_file(capture_path);
  if (!result.ok()) {
    throw BadConfigError("replay capture is corrupt at byte offset " +
                         std::to_string(*result.corrupt_offset) + ": " +
                         capture_path);
  }
  for (const auto& record : result.records) {
    if (record.kind == pklog::RecordKind::kEvent ||
        record.kind == pklog::RecordKind::kAclReceived) {
      stamps_.push_back(record.timestamp);
    }
  }
  frames_ = inbound_frames(result.records);

  if (recorded_pacing_) {
    pacer_ = std::thread([this] { pace_loop(); });
  }
}

ReplayTransport::~ReplayTransport() {
  close();
  if (pacer_.joinable()) {
    pacer_.join();
  }
}

void ReplayTransport::deliver(std::size_t index) {
  FrameSink sink;
  {
    std::lock_guard<std::mutex> lock(state_mutex_);
    sink = sink_;
  }
  if (sink) {
    sink(frames_[index]);
  }
}

void ReplayTransport::pace_loop() {
  for (std::size_t i = 0; i < frames_.size() && up_; ++i) {
    if (i > 0) {
      const int64_t gap = micros_of(stamps_[i]) - micros_of(stamps_[i - 1]);
      if (gap > 0) {
        std::this_thread::sleep_for(std::chrono::microseconds(gap));
      }
    }
    // Wait for a sink before playing the first frame.
    while (up_) {
      {
        std::lock_guard<std::mutex> lock(state_mutex_);
        if (sink_) {
          break;
        }
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (!up_) {
      break;
    }
    deliver(i);
    std::lock_guard<std::mutex> lock(state_mutex_);
    delivered_ = i + 1;
  }
}

void ReplayTransport::send(std::span<const uint8_t> h4_frame) {
  if (!up_) {
    throw TransportDownError("replay transport is closed");
  }
  (void)h4_frame;  // playback only; there is no controller to reach
  dropped_sends_ += 1;
}

void ReplayTransport::set_frame_sink(FrameSink sink) {
  if (recorded_pacing_) {
    std::lock_guard<std::mutex> lock(state_mutex_);
    sink_ = std::move(sink);
    return;
  }
  // Accelerated pacing: play everything not yet delivered, inline.
  FrameSink installed;
  std::size_t start = 0;
  {
    std::lock_guard<std::mutex> lock(state_mutex_);
    sink_ = std::move(sink);
    installed = sink_;
    start = delivered_;
    if (installed) {
      delivered_ = frames_.size();
    }
  }
  if (!installed) {
    return;
  }
  for (std::size_t i = start; i < frames_.size() && up_; ++i) {
    installed(frames_[i]);
  }
}

bool ReplayTransport::is_up() const { return up_; }

void ReplayTransport::close() { up_ = false; }

}  // namespace btraw::transport
