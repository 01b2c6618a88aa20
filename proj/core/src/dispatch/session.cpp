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

#include "btraw/dispatch/session.hpp"

#include <cstdio>
#include <thread>

#include "btraw/hci/constants.hpp"
#include "btraw/pklog/render.hpp"

namespace btraw::dispatch {
namespace {

// Packet-boundary flag stamped on every raw ACL send, as seen in vendor
// traces.
constexpr uint8_t kDefaultPbFlag = 0x3;

uint16_t read_le16(const std::vector<uint8_t>& bytes, std::size_t offset) {
  return static_cast<uint16_t>(bytes[offset] |
                               (static_cast<uint16_t>(bytes[offset + 1]) << 8));
}

std::string request_suffix(uint32_t request) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), " - Request: 0x%04X", request);
  return buf;
}

}  // namespace

RawDispatchSession::RawDispatchSession(
    std::shared_ptr<transport::TransportSession> transport,
    std::shared_ptr<pklog::CaptureLog> capture)
    : transport_(std::move(transport)), capture_(std::move(capture)) {
  user_client_.register_routine(
      kSelectorSendHci, [this](std::span<const uint8_t> payload) {
        transport_->send(payload);
        return std::vector<uint8_t>{0x00};
      });
  user_client_.register_routine(
      kSelectorSendAcl, [this](std::span<const uint8_t> payload) {
        transport_->send(payload);
        return std::vector<uint8_t>{0x00};
      });
  transport_->set_frame_sink(
      [this](std::vector<uint8_t> frame) { on_inbound_frame(std::move(frame)); });
}

RawDispatchSession::~RawDispatchSession() {
  // Detach before members are torn down; the transport may still deliver
  // from its reader context.
  transport_->set_frame_sink(nullptr);
}

void RawDispatchSession::append_error(const std::string& message) {
  pklog::LogRecord record;
  record.timestamp = capture_->now();
  record.kind = pklog::RecordKind::kError;
  record.message = message;
  capture_->append(std::move(record));
}

DispatchStatus RawDispatchSession::fail(int code, const std::string& message) {
  append_error(message);
  return DispatchStatus{code};
}

DispatchStatus RawDispatchSession::send_raw_command(
    uint32_t request, std::span<const uint8_t> command_data) {
  if (command_data.size() < 3) {
    return fail(kStatusMalformedBuffer,
                "Malformed HCI command buffer (shorter than header)");
  }
  const std::size_t declared = command_data[2];
  if (declared != command_data.size() - 3) {
    return fail(kStatusMalformedBuffer,
                "Malformed HCI command buffer (length field mismatch)");
  }
  const hci::Opcode opcode = hci::Opcode::from_packed(
      static_cast<uint16_t>(command_data[0] | (command_data[1] << 8)));

  pklog::LogRecord record;
  record.timestamp = capture_->now();
  record.kind = pklog::RecordKind::kCommand;
  record.message = pklog::command_summary(opcode) + request_suffix(request);
  record.payload.assign(command_data.begin(), command_data.end());
  capture_->append(std::move(record));

  std::vector<uint8_t> frame;
  frame.reserve(1 + command_data.size());
  frame.push_back(hci::kIndicatorCommand);
  frame.insert(frame.end(), command_data.begin(), command_data.end());
  try {
    user_client_.call(kSelectorSendHci, frame);
  } catch (const transport::TransportError& error) {
    return fail(kStatusTransportDown,
                std::string("Transport down: ") + error.what());
  }
  return DispatchStatus{kStatusOk};
}

DispatchStatus RawDispatchSession::send_raw_acl(std::span<const uint8_t> data,
                                                uint32_t handle,
                                                uint32_t request) {
  (void)request;  // opaque: never interpreted, never validated
  if (data.empty()) {
    return fail(kStatusMalformedBuffer, "Malformed ACL buffer (empty payload)");
  }
  if (data.size() > hci::kMaxAclPayload) {
    return fail(kStatusMalformedBuffer,
                "Malformed ACL buffer (payload exceeds 65535 bytes)");
  }
  if (handle > hci::ConnectionHandle::kMaxValid) {
    char buf[64];
    std::snprintf(buf, sizeof(buf),
                  "Invalid connection handle 0x%X (out of range)", handle);
    return fail(kStatusHandleOutOfRange, buf);
  }

  const hci::ConnectionHandle connection(static_cast<uint16_t>(handle));
  bool live;
  {
    std::lock_guard<std::mutex> lock(state_mutex_);
    live = handles_.count(connection.value()) != 0;
  }

  if (!live) {
    // Record sequence as emitted by the real path: the hardware-layer
    // error brackets the send entry it refers to.
    append_error(pklog::format_no_device_handle_error(handle));
  }

  pklog::LogRecord send_record;
  send_record.timestamp = capture_->now();
  send_record.kind = pklog::RecordKind::kAclSent;
  send_record.handle = connection;
  send_record.message =
      pklog::format_acl_data_message(connection, kDefaultPbFlag, data.size());
  send_record.payload.assign(data.begin(), data.end());
  capture_->append(std::move(send_record));

  if (!live) {
    append_error(pklog::format_acl_not_sent_error(handle));
    return DispatchStatus{kStatusNoDeviceHandle};
  }

  hci::AclDataPacket packet;
  packet.handle = connection;
  packet.pb_flag = kDefaultPbFlag;
  packet.bc_flag = 0;
  packet.payload.assign(data.begin(), data.end());
  try {
    user_client_.call(kSelectorSendAcl, hci::encode_h4(hci::HciPacket{packet}));
  } catch (const transport::TransportError& error) {
    return fail(kStatusTransportDown,
                std::string("Transport down: ") + error.what());
  }
  return DispatchStatus{kStatusOk};
}

std::vector<uint8_t> RawDispatchSession::dispatch_user_client(
    uint32_t selector, std::span<const uint8_t> payload) {
  return user_client_.call(selector, payload);
}

void RawDispatchSession::set_event_sink(EventSink sink) {
  std::lock_guard<std::mutex> lock(state_mutex_);
  event_sink_ = std::move(sink);
}

void RawDispatchSession::on_inbound_frame(std::vector<uint8_t> frame) {
  const auto result = hci::decode_h4(frame);
  if (!result.ok()) {
    append_error("Dropped malformed inbound frame");
    return;
  }
  const hci::HciPacket& packet = *result.packet;

  if (const auto* event = std::get_if<hci::EventPacket>(&packet)) {
    snoop_event(*event);
    capture_->append(pklog::make_event_record(capture_->now(), *event));
  } else if (const auto* acl = std::get_if<hci::AclDataPacket>(&packet)) {
    pklog::LogRecord record;
    record.timestamp = capture_->now();
    record.kind = pklog::RecordKind::kAclReceived;
    record.handle = acl->handle;
    record.message = pklog::format_acl_data_message(acl->handle, acl->pb_flag,
                                                    acl->payload.size());
    // Inbound records keep the unframed wire packet so captures replay.
    record.payload.assign(frame.begin() + 1, frame.end());
    capture_->append(std::move(record));
  }

  EventSink sink;
  {
    std::lock_guard<std::mutex> lock(state_mutex_);
    queue_.push_back(packet);
    total_received_ += 1;
    sink = event_sink_;
  }
  if (sink) {
    sink(packet);
  }
}

void RawDispatchSession::snoop_event(const hci::EventPacket& event) {
  std::lock_guard<std::mutex> lock(state_mutex_);
  const auto& p = event.params;
  switch (event.code) {
    case hci::kEventConnectionComplete:
      if (p.size() >= 3 && p[0] == hci::kStatusSuccess) {
        handles_.insert(static_cast<uint16_t>(
            read_le16(p, 1) & hci::ConnectionHandle::kFieldMax));
      }
      break;
    case hci::kEventDisconnectionComplete:
      if (p.size() >= 3) {
        handles_.erase(static_cast<uint16_t>(
            read_le16(p, 1) & hci::ConnectionHandle::kFieldMax));
      }
      break;
    case hci::kEventCommandComplete:
      // Reset drops every connection on the controller; mirror that.
      if (p.size() >= 4 && read_le16(p, 1) == hci::kOpcodeReset.packed() &&
          p[3] == hci::kStatusSuccess) {
        handles_.clear();
      }
      break;
    default:
      break;
  }
}

std::vector<hci::HciPacket> RawDispatchSession::drain_events() {
  std::lock_guard<std::mutex> lock(state_mutex_);
  std::vector<hci::HciPacket> out(queue_.begin(), queue_.end());
  queue_.clear();
  return out;
}

void RawDispatchSession::wait_quiescent(std::chrono::milliseconds idle_window) {
  transport_->settle();
  if (transport_->is_synchronous()) {
    return;
  }
  const auto poll = std::chrono::milliseconds(10);
  auto stable_since = std::chrono::steady_clock::now();
  uint64_t seen;
  {
    std::lock_guard<std::mutex> lock(state_mutex_);
    seen = total_received_;
  }
  while (std::chrono::steady_clock::now() - stable_since < idle_window) {
    std::this_thread::sleep_for(poll);
    transport_->settle();
    uint64_t now_count;
    {
      std::lock_guard<std::mutex> lock(state_mutex_);
      now_count = total_received_;
    }
    if (now_count != seen) {
      seen = now_count;
      stable_since = std::chrono::steady_clock::now();
    }
  }
}

std::vector<hci::HciPacket> RawDispatchSession::wait_events(
    std::chrono::milliseconds idle_window) {
  wait_quiescent(idle_window);
  return drain_events();
}

bool RawDispatchSession::is_live(uint32_t handle) const {
  std::lock_guard<std::mutex> lock(state_mutex_);
  return handle <= hci::ConnectionHandle::kMaxValid &&
         handles_.count(static_cast<uint16_t>(handle)) != 0;
}

std::vector<uint16_t> RawDispatchSession::live_handles() const {
  std::lock_guard<std::mutex> lock(state_mutex_);
  return {handles_.begin(), handles_.end()};
}

}  // namespace btraw::dispatch
