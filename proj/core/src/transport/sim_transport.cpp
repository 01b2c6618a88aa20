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

#include "btraw/transport/sim_transport.hpp"

#include "btraw/hci/h4.hpp"

namespace btraw::transport {

SimTransport::SimTransport(const sim::ControllerProfile& profile)
    : controller_(std::make_unique<sim::Controller>(profile)) {
  controller_->set_host_sink([this](const hci::HciPacket& packet) {
    deliver(hci::encode_h4(packet));
  });
}

void SimTransport::deliver(std::vector<uint8_t> frame) {
  FrameSink sink;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!sink_) {
      backlog_.push_back(std::move(frame));
      return;
    }
    sink = sink_;
  }
  sink(std::move(frame));
}

void SimTransport::send(std::span<const uint8_t> h4_frame) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!up_) {
      throw TransportDownError("in-process transport is closed");
    }
  }
  const auto result = hci::decode_h4(h4_frame);
  if (!result.ok()) {
    // The dispatch layer only hands down frames it built itself.
    throw TransportError("malformed H4 frame handed to transport");
  }
  controller_->ingest(*result.packet);
}

void SimTransport::set_frame_sink(FrameSink sink) {
  std::vector<std::vector<uint8_t>> backlog;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    sink_ = std::move(sink);
    backlog.swap(backlog_);
    sink = sink_;
  }
  if (sink) {
    for (auto& frame : backlog) {
      sink(std::move(frame));
    }
  }
}

bool SimTransport::is_up() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return up_;
}

void SimTransport::close() {
  std::lock_guard<std::mutex> lock(mutex_);
  up_ = false;
}

void SimTransport::settle() { controller_->settle(); }

}  // namespace btraw::transport
