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

#include "btraw/sim/controller.hpp"

#include <algorithm>
#include <random>

namespace btraw::sim {
namespace {

constexpr const char* kPatchedMarker = " (patched)";

uint16_t read_le16(std::span<const uint8_t> bytes, std::size_t offset) {
  return static_cast<uint16_t>(bytes[offset] |
                               (static_cast<uint16_t>(bytes[offset + 1]) << 8));
}

uint32_t read_le32(std::span<const uint8_t> bytes, std::size_t offset) {
  return static_cast<uint32_t>(bytes[offset]) |
         (static_cast<uint32_t>(bytes[offset + 1]) << 8) |
         (static_cast<uint32_t>(bytes[offset + 2]) << 16) |
         (static_cast<uint32_t>(bytes[offset + 3]) << 24);
}

void append_le16(std::vector<uint8_t>& out, uint16_t value) {
  out.push_back(static_cast<uint8_t>(value & 0xFF));
  out.push_back(static_cast<uint8_t>(value >> 8));
}

std::array<uint8_t, 6> derive_bd_addr(uint64_t seed) {
  std::mt19937_64 rng(seed);
  const uint64_t bits = rng();
  std::array<uint8_t, 6> addr{};
  for (int i = 0; i < 6; ++i) {
    addr[static_cast<std::size_t>(i)] =
        static_cast<uint8_t>(bits >> (8 * i));
  }
  return addr;
}

}  // namespace

Controller::Controller(ControllerProfile profile)
    : profile_(std::move(profile)),
      bd_addr_(profile_.bd_addr_set ? profile_.bd_addr
                                    : derive_bd_addr(profile_.seed)),
      local_name_(profile_.local_name) {}

void Controller::set_host_sink(HostSink sink) {
  std::lock_guard<std::mutex> lock(mutex_);
  host_sink_ = std::move(sink);
}

void Controller::set_peer_sink(PeerSink sink) {
  std::lock_guard<std::mutex> lock(mutex_);
  peer_sink_ = std::move(sink);
}

void Controller::emit(const std::vector<hci::EventPacket>& events) {
  if (!host_sink_) {
    return;
  }
  for (const auto& event : events) {
    host_sink_(hci::HciPacket{event});
  }
}

void Controller::ingest(const hci::HciPacket& packet) {
  if (const auto* cmd = std::get_if<hci::CommandPacket>(&packet)) {
    handle_command(*cmd);
  } else if (const auto* acl = std::get_if<hci::AclDataPacket>(&packet)) {
    handle_acl(*acl);
  }
  // Events are controller-to-host only; SCO has no data plane here.
}

hci::EventPacket Controller::command_complete(
    hci::Opcode opcode, std::span<const uint8_t> ret) const {
  hci::EventPacket event;
  event.code = hci::kEventCommandComplete;
  event.params.push_back(0x01);  // Num_HCI_Command_Packets
  append_le16(event.params, opcode.packed());
  event.params.insert(event.params.end(), ret.begin(), ret.end());
  return event;
}

hci::EventPacket Controller::command_status(uint8_t status,
                                            hci::Opcode opcode) const {
  hci::EventPacket event;
  event.code = hci::kEventCommandStatus;
  event.params.push_back(status);
  event.params.push_back(0x01);  // Num_HCI_Command_Packets
  append_le16(event.params, opcode.packed());
  return event;
}

hci::EventPacket Controller::nocp(uint16_t handle) const {
  hci::EventPacket event;
  event.code = hci::kEventNumberOfCompletedPackets;
  event.params.push_back(0x01);  // Number_of_Handles
  append_le16(event.params, handle);
  append_le16(event.params, 0x0001);
  return event;
}

std::vector<hci::EventPacket> Controller::handle_command(
    const hci::CommandPacket& cmd) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<hci::EventPacket> events;
  ++step_;
  sweep_completions_locked(events);
  auto command_events = command_locked(cmd);
  events.insert(events.end(), command_events.begin(), command_events.end());
  emit(events);
  return events;
}

std::vector<hci::EventPacket> Controller::command_locked(
    const hci::CommandPacket& cmd) {
  std::vector<hci::EventPacket> events;
  const hci::Opcode opcode = cmd.opcode;
  const auto& params = cmd.params;

  if (opcode == hci::kOpcodeReset) {
    reset_locked();
    const uint8_t ret[] = {hci::kStatusSuccess};
    events.push_back(command_complete(opcode, ret));
    return events;
  }

  if (opcode == hci::kOpcodeReadBdAddr) {
    std::vector<uint8_t> ret;
    ret.push_back(hci::kStatusSuccess);
    ret.insert(ret.end(), bd_addr_.begin(), bd_addr_.end());
    events.push_back(command_complete(opcode, ret));
    return events;
  }

  if (opcode == hci::kOpcodeReadLocalName) {
    std::vector<uint8_t> ret;
    ret.push_back(hci::kStatusSuccess);
    ret.resize(1 + hci::kLocalNameSize, 0x00);
    const std::size_t copy =
        std::min(local_name_.size(), hci::kLocalNameSize);
    std::copy_n(local_name_.begin(), copy, ret.begin() + 1);
    events.push_back(command_complete(opcode, ret));
    return events;
  }

  if (opcode == hci::kOpcodeCreateConnection) {
    if (params.size() < hci::kBdAddrSize) {
      events.push_back(
          command_status(hci::kStatusInvalidParameters, opcode));
      return events;
    }
    events.push_back(command_status(hci::kStatusSuccess, opcode));

    // Lowest free handle, never reusing a live one (§ 5.4.2 reserves
    // values above 0x0EFF).
    uint16_t handle = kFirstHandle;
    while (handle <= hci::ConnectionHandle::kMaxValid &&
           connections_.count(handle) != 0) {
      ++handle;
    }

    hci::EventPacket complete;
    complete.code = hci::kEventConnectionComplete;
    if (handle > hci::ConnectionHandle::kMaxValid) {
      complete.params.push_back(hci::kStatusConnectionLimitExceeded);
      append_le16(complete.params, 0x0000);
    } else {
      Connection conn;
      std::copy_n(params.begin(), hci::kBdAddrSize, conn.peer.begin());
      connections_.emplace(handle, conn);
      complete.params.push_back(hci::kStatusSuccess);
      append_le16(complete.params, handle);
    }
    complete.params.insert(complete.params.end(), params.begin(),
                           params.begin() + hci::kBdAddrSize);
    complete.params.push_back(hci::kLinkTypeAcl);
    complete.params.push_back(0x00);  // encryption disabled
    events.push_back(std::move(complete));
    return events;
  }

  if (opcode == hci::kOpcodeDisconnect) {
    if (params.size() < 3) {
      events.push_back(
          command_status(hci::kStatusInvalidParameters, opcode));
      return events;
    }
    const uint16_t handle = read_le16(params, 0) &
                            hci::ConnectionHandle::kFieldMax;
    const uint8_t reason = params[2];
    if (connections_.count(handle) == 0) {
      events.push_back(
          command_status(hci::kStatusUnknownConnectionId, opcode));
      return events;
    }
    events.push_back(command_status(hci::kStatusSuccess, opcode));
    flush_handle_locked(handle, events);
    connections_.erase(handle);

    hci::EventPacket complete;
    complete.code = hci::kEventDisconnectionComplete;
    complete.params.push_back(hci::kStatusSuccess);
    append_le16(complete.params, handle);
    complete.params.push_back(reason);
    events.push_back(std::move(complete));
    return events;
  }

  if (opcode.ogf() == profile_.vendor.ogf) {
    vendor_command_locked(cmd, events);
    if (!events.empty()) {
      return events;
    }
  }

  events.push_back(command_status(hci::kStatusUnknownCommand, opcode));
  return events;
}

void Controller::vendor_command_locked(const hci::CommandPacket& cmd,
                                       std::vector<hci::EventPacket>& events) {
  const uint16_t ocf = cmd.opcode.ocf();
  const auto& params = cmd.params;
  const uint8_t invalid[] = {hci::kStatusInvalidParameters};

  if (ocf == profile_.vendor.write_ram_ocf) {
    if (params.size() < 4) {
      events.push_back(command_complete(cmd.opcode, invalid));
      return;
    }
    write_ram_locked(read_le32(params, 0),
                     std::span<const uint8_t>(params).subspan(4), events);
  } else if (ocf == profile_.vendor.read_ram_ocf) {
    if (params.size() != 5) {
      events.push_back(command_complete(cmd.opcode, invalid));
      return;
    }
    read_ram_locked(read_le32(params, 0), params[4], events);
  } else if (ocf == profile_.vendor.launch_ram_ocf) {
    if (params.size() < 4) {
      events.push_back(command_complete(cmd.opcode, invalid));
      return;
    }
    launch_ram_locked(read_le32(params, 0), events);
  }
}

void Controller::write_ram_locked(uint32_t addr,
                                  std::span<const uint8_t> bytes,
                                  std::vector<hci::EventPacket>& events) {
  const hci::Opcode opcode{profile_.vendor.ogf, profile_.vendor.write_ram_ocf};
  if (bytes.size() > kMaxRamChunk) {
    const uint8_t ret[] = {hci::kStatusInvalidParameters};
    events.push_back(command_complete(opcode, ret));
    return;
  }
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    ram_[addr + static_cast<uint32_t>(i)] = bytes[i];
  }
  const uint8_t ret[] = {hci::kStatusSuccess};
  events.push_back(command_complete(opcode, ret));
}

void Controller::read_ram_locked(uint32_t addr, std::size_t length,
                                 std::vector<hci::EventPacket>& events) {
  const hci::Opcode opcode{profile_.vendor.ogf, profile_.vendor.read_ram_ocf};
  if (length > kMaxRamChunk) {
    const uint8_t ret[] = {hci::kStatusInvalidParameters};
    events.push_back(command_complete(opcode, ret));
    return;
  }
  std::vector<uint8_t> ret;
  ret.push_back(hci::kStatusSuccess);
  for (std::size_t i = 0; i < length; ++i) {
    const auto it = ram_.find(addr + static_cast<uint32_t>(i));
    ret.push_back(it == ram_.end() ? 0x00 : it->second);  // unwritten = 0x00
  }
  events.push_back(command_complete(opcode, ret));
}

void Controller::launch_ram_locked(uint32_t addr,
                                   std::vector<hci::EventPacket>& events) {
  const hci::Opcode opcode{profile_.vendor.ogf,
                           profile_.vendor.launch_ram_ocf};
  if (addr == profile_.patch_entry) {
    // Stand-in for a temporary firmware patch taking effect: the change
    // is observable through Read Local Name.
    local_name_ += kPatchedMarker;
    if (local_name_.size() > hci::kLocalNameSize) {
      local_name_.resize(hci::kLocalNameSize);
    }
  }
  const uint8_t ret[] = {hci::kStatusSuccess};
  events.push_back(command_complete(opcode, ret));
}

std::vector<hci::EventPacket> Controller::vendor_write_ram(
    uint32_t addr, std::span<const uint8_t> bytes) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<hci::EventPacket> events;
  ++step_;
  sweep_completions_locked(events);
  write_ram_locked(addr, bytes, events);
  emit(events);
  return events;
}

std::vector<hci::EventPacket> Controller::vendor_read_ram(uint32_t addr,
                                                          std::size_t length) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<hci::EventPacket> events;
  ++step_;
  sweep_completions_locked(events);
  read_ram_locked(addr, length, events);
  emit(events);
  return events;
}

std::vector<hci::EventPacket> Controller::vendor_launch_ram(uint32_t addr) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<hci::EventPacket> events;
  ++step_;
  sweep_completions_locked(events);
  launch_ram_locked(addr, events);
  emit(events);
  return events;
}

Controller::AclResult Controller::handle_acl(const hci::AclDataPacket& packet) {
  std::lock_guard<std::mutex> lock(mutex_);
  AclResult result;
  ++step_;
  sweep_completions_locked(result.events);

  if (connections_.count(packet.handle.value()) == 0) {
    result.status = AclIngest::kUnknownHandle;
    emit(result.events);
    return result;
  }

  if (in_flight_.size() < profile_.acl_total_credits) {
    accept_locked(packet, result.events);
    sweep_completions_locked(result.events);
    result.status = AclIngest::kAccepted;
  } else {
    pending_.push_back(packet);
    result.status = AclIngest::kQueued;
  }
  emit(result.events);
  return result;
}

void Controller::accept_locked(const hci::AclDataPacket& packet,
                               std::vector<hci::EventPacket>& events) {
  auto& conn = connections_.at(packet.handle.value());
  conn.outstanding += 1;
  if (peer_sink_) {
    peer_sink_(packet.handle, packet.payload);
  }
  in_flight_.push_back(
      {packet.handle.value(), step_ + profile_.acl_completion_delay});
  (void)events;
}

void Controller::sweep_completions_locked(
    std::vector<hci::EventPacket>& events) {
  while (!in_flight_.empty() && in_flight_.front().due_step <= step_) {
    const InFlight done = in_flight_.front();
    in_flight_.pop_front();
    auto it = connections_.find(done.handle);
    if (it != connections_.end() && it->second.outstanding > 0) {
      it->second.outstanding -= 1;
    }
    events.push_back(nocp(done.handle));
    accept_pending_locked(events);
  }
  accept_pending_locked(events);
}

void Controller::accept_pending_locked(std::vector<hci::EventPacket>& events) {
  while (!pending_.empty() &&
         in_flight_.size() < profile_.acl_total_credits) {
    const hci::AclDataPacket packet = pending_.front();
    pending_.pop_front();
    if (connections_.count(packet.handle.value()) == 0) {
      continue;  // connection dropped while queued
    }
    accept_locked(packet, events);
  }
}

void Controller::flush_handle_locked(uint16_t handle,
                                     std::vector<hci::EventPacket>& events) {
  // Complete whatever is still in flight for the handle so accepted
  // packets keep their one-NOCP guarantee.
  std::deque<InFlight> keep;
  for (const InFlight& entry : in_flight_) {
    if (entry.handle == handle) {
      events.push_back(nocp(handle));
    } else {
      keep.push_back(entry);
    }
  }
  in_flight_.swap(keep);
  auto it = connections_.find(handle);
  if (it != connections_.end()) {
    it->second.outstanding = 0;
  }
  std::erase_if(pending_, [handle](const hci::AclDataPacket& p) {
    return p.handle.value() == handle;
  });
}

std::vector<hci::EventPacket> Controller::settle() {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<hci::EventPacket> events;
  while (!in_flight_.empty() || !pending_.empty()) {
    ++step_;
    if (!in_flight_.empty() && in_flight_.front().due_step > step_) {
      step_ = in_flight_.front().due_step;
    }
    sweep_completions_locked(events);
    if (in_flight_.empty() && !pending_.empty()) {
      // Remaining packets can only be dead-handle leftovers; the sweep
      // drops them.
      accept_pending_locked(events);
      if (in_flight_.empty() && !pending_.empty()) {
        pending_.clear();
      }
    }
  }
  emit(events);
  return events;
}

void Controller::reset_locked() {
  connections_.clear();
  ram_.clear();
  in_flight_.clear();
  pending_.clear();
  local_name_ = profile_.local_name;
}

std::array<uint8_t, 6> Controller::bd_addr() const { return bd_addr_; }

std::string Controller::local_name() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return local_name_;
}

uint16_t Controller::acl_credits_total() const {
  return profile_.acl_total_credits;
}

std::size_t Controller::total_outstanding() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return in_flight_.size();
}

std::size_t Controller::pending_depth() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return pending_.size();
}

bool Controller::is_live(uint16_t handle) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return connections_.count(handle) != 0;
}

std::vector<uint16_t> Controller::live_handles() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<uint16_t> handles;
  handles.reserve(connections_.size());
  for (const auto& [handle, conn] : connections_) {
    handles.push_back(handle);
  }
  return handles;
}

}  // namespace btraw::sim
