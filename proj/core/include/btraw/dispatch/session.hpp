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

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <vector>

#include "btraw/dispatch/status.hpp"
#include "btraw/dispatch/user_client.hpp"
#include "btraw/hci/h4.hpp"
#include "btraw/pklog/capture.hpp"
#include "btraw/transport/transport.hpp"

namespace btraw::dispatch {

/// Opaque request identifier paired with the raw bytes of one send. The
/// identifier has no arithmetic meaning anywhere in this stack; it is only
/// echoed into capture records.
struct RawRequest {
  uint32_t request_id = 0;
  std::vector<uint8_t> data;
};

/// The raw-send API surface over one transport: validates buffers, appends
/// a capture record for every action, and crosses the user-client hop to
/// the bound transport. There is deliberately no caller-identity input on
/// any path — success or failure depends solely on buffer validity and
/// connection state.
///
/// A session is single-owner. Controller responses are delivered on a
/// context distinct from the caller's; consumers must tolerate delivery
/// after the originating call returned.
class RawDispatchSession {
 public:
  RawDispatchSession(std::shared_ptr<transport::TransportSession> transport,
                     std::shared_ptr<pklog::CaptureLog> capture);
  ~RawDispatchSession();

  RawDispatchSession(const RawDispatchSession&) = delete;
  RawDispatchSession& operator=(const RawDispatchSession&) = delete;

  /// Sends an unframed raw command buffer (opcode, length, params).
  DispatchStatus send_raw_command(uint32_t request,
                                  std::span<const uint8_t> command_data);

  DispatchStatus send_raw_command(const RawRequest& request) {
    return send_raw_command(request.request_id, request.data);
  }

  /// Sends ACL payload bytes on a connection. The parameter order mirrors
  /// the dispatch contract: data, handle, request.
  DispatchStatus send_raw_acl(std::span<const uint8_t> data, uint32_t handle,
                              uint32_t request);

  /// The selector-dispatched hop itself, exposed for callers that want to
  /// go one layer deeper. Returns the synchronous status buffer; events
  /// still arrive asynchronously. Throws UnknownSelectorError.
  std::vector<uint8_t> dispatch_user_client(uint32_t selector,
                                            std::span<const uint8_t> payload);

  using EventSink = std::function<void(const hci::HciPacket&)>;
  void set_event_sink(EventSink sink);

  /// Pops every inbound packet queued so far.
  std::vector<hci::HciPacket> drain_events();

  /// Settles the transport and waits until no inbound packet has arrived
  /// for `idle_window` (returns immediately after settling on synchronous
  /// backends), then drains.
  std::vector<hci::HciPacket> wait_events(
      std::chrono::milliseconds idle_window = std::chrono::milliseconds(100));

  /// Blocks until inbound traffic is quiescent without draining the queue.
  void wait_quiescent(
      std::chrono::milliseconds idle_window = std::chrono::milliseconds(100));

  bool is_live(uint32_t handle) const;
  std::vector<uint16_t> live_handles() const;

  const std::shared_ptr<pklog::CaptureLog>& capture() const {
    return capture_;
  }
  const std::shared_ptr<transport::TransportSession>& transport() const {
    return transport_;
  }

 private:
  void on_inbound_frame(std::vector<uint8_t> frame);
  void snoop_event(const hci::EventPacket& event);
  void append_error(const std::string& message);
  DispatchStatus fail(int code, const std::string& message);

  std::shared_ptr<transport::TransportSession> transport_;
  std::shared_ptr<pklog::CaptureLog> capture_;
  UserClient user_client_;

  mutable std::mutex state_mutex_;
  std::set<uint16_t> handles_;
  std::deque<hci::HciPacket> queue_;
  uint64_t total_received_ = 0;
  EventSink event_sink_;
};

}  // namespace btraw::dispatch
