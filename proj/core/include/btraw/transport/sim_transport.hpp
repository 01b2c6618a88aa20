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

#include <memory>
#include <mutex>

#include "btraw/sim/controller.hpp"
#include "btraw/transport/transport.hpp"

namespace btraw::transport {

/// Binds directly to an in-process simulated controller. Sends are decoded
/// and processed inline; controller events come back through the frame
/// sink before send() returns.
class SimTransport : public TransportSession {
 public:
  explicit SimTransport(const sim::ControllerProfile& profile);

  void send(std::span<const uint8_t> h4_frame) override;
  void set_frame_sink(FrameSink sink) override;
  bool is_up() const override;
  void close() override;
  void settle() override;
  bool is_synchronous() const override { return true; }

  sim::Controller& controller() { return *controller_; }

 private:
  void deliver(std::vector<uint8_t> frame);

  std::unique_ptr<sim::Controller> controller_;
  mutable std::mutex mutex_;
  FrameSink sink_;
  std::vector<std::vector<uint8_t>> backlog_;
  bool up_ = true;
};

}  // namespace btraw::transport
