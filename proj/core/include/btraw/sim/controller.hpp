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

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "btraw/hci/constants.hpp"
#include "btraw/hci/packet.hpp"
#include "btraw/sim/profile.hpp"

namespace btraw::sim {

/// Deterministic simulated Broadcom-style HCI controller: command handling,
/// connection lifecycle, loopback ACL with credit-based flow control, and
/// vendor RAM read/write/launch commands.
///
/// The controller owns its state exclusively and processes one inbound
/// packet at a time; producers on any context may call in concurrently.
/// Sinks are invoked in processing order while the controller is busy and
/// must not call back into it.
class Controller {
 public:
  using HostSink = std::function<void(const hci::HciPacket&)>;
  using PeerSink =
      std::function<void(hci::ConnectionHandle, std::span<const uint8_t>)>;

  static constexpr uint16_t kFirstHandle = 0x000B;
  static constexpr std::size_t kMaxRamChunk = 251;

  explicit Controller(ControllerProfile profile = {});

  void set_host_sink(HostSink sink);
  void set_peer_sink(PeerSink sink);

  enum class AclIngest : uint8_t {
    kAccepted,
    /// All credits in use; the packet is queued until a completion frees
    /// one.
    kQueued,
    /// The handle names no live connection. No event is emitted; the
    /// dispatch layer is responsible for logging the failure.
    kUnknownHandle,
  };

  struct AclResult {
    AclIngest status = AclIngest::kUnknownHandle;
    std::vector<hci::EventPacket> events;
  };

  /// Serialized entry point for any packet. Events reach the host sink;
  /// SCO packets are framed but have no controller behavior and are
  /// dropped.
  void ingest(const hci::HciPacket& packet);

  /// All command failures are reported in-band as HCI status events.
  std::vector<hci::EventPacket> handle_command(const hci::CommandPacket& cmd);

  AclResult handle_acl(const hci::AclDataPacket& packet);

  std::vector<hci::EventPacket> vendor_write_ram(
      uint32_t addr, std::span<const uint8_t> bytes);
  std::vector<hci::EventPacket> vendor_read_ram(uint32_t addr,
                                                std::size_t length);
  std::vector<hci::EventPacket> vendor_launch_ram(uint32_t addr);

  /// Drives pending ACL completions to quiescence: after this, every
  /// accepted packet has produced its Number of Completed Packets event.
  std::vector<hci::EventPacket> settle();

  std::array<uint8_t, 6> bd_addr() const;
  std::string local_name() const;
  uint16_t acl_credits_total() const;
  std::size_t total_outstanding() const;
  std::size_t pending_depth() const;
  bool is_live(uint16_t handle) const;
  std::vector<uint16_t> live_handles() const;
  const ControllerProfile& profile() const { return profile_; }

 private:
  struct Connection {
    std::array<uint8_t, 6> peer{};
    uint32_t outstanding = 0;
  };

  struct InFlight {
    uint16_t handle = 0;
    uint64_t due_step = 0;
  };

  void emit(const std::vector<hci::EventPacket>& events);

  std::vector<hci::EventPacket> command_locked(const hci::CommandPacket& cmd);
  void vendor_command_locked(const hci::CommandPacket& cmd,
                             std::vector<hci::EventPacket>& events);
  void write_ram_locked(uint32_t addr, std::span<const uint8_t> bytes,
                        std::vector<hci::EventPacket>& events);
  void read_ram_locked(uint32_t addr, std::size_t length,
                       std::vector<hci::EventPacket>& events);
  void launch_ram_locked(uint32_t addr,
                         std::vector<hci::EventPacket>& events);
  void reset_locked();

  void accept_locked(const hci::AclDataPacket& packet,
                     std::vector<hci::EventPacket>& events);
  void sweep_completions_locked(std::vector<hci::EventPacket>& events);
  void accept_pending_locked(std::vector<hci::EventPacket>& events);
  void flush_handle_locked(uint16_t handle,
                           std::vector<hci::EventPacket>& events);

  hci::EventPacket command_complete(hci::Opcode opcode,
                                    std::span<const uint8_t> ret) const;
  hci::EventPacket command_status(uint8_t status, hci::Opcode opcode) const;
  hci::EventPacket nocp(uint16_t handle) const;

  const ControllerProfile profile_;
  std::array<uint8_t, 6> bd_addr_{};

  mutable std::mutex mutex_;
  std::string local_name_;
  std::map<uint16_t, Connection> connections_;
  std::unordered_map<uint32_t, uint8_t> ram_;
  std::deque<InFlight> in_flight_;
  std::deque<hci::AclDataPacket> pending_;
  uint64_t step_ = 0;

  HostSink host_sink_;
  PeerSink peer_sink_;
};

}  // namespace btraw::sim
