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

#include <cstdint>
#include <variant>
#include <vector>

#include "btraw/hci/opcode.hpp"

namespace btraw::hci {

inline constexpr std::size_t kMaxCommandParams = 255;
inline constexpr std::size_t kMaxEventParams = 255;
inline constexpr std::size_t kMaxAclPayload = 0xFFFF;
inline constexpr std::size_t kMaxScoPayload = 255;
inline constexpr uint8_t kMaxTwoBitFlag = 0x3;

/// HCI command: opcode plus parameter bytes (Vol 4, Part E § 5.4.1).
struct CommandPacket {
  Opcode opcode;
  std::vector<uint8_t> params;

  bool operator==(const CommandPacket&) const = default;
};

/// HCI event: event code plus parameter bytes (Vol 4, Part E § 5.4.4).
struct EventPacket {
  uint8_t code = 0;
  std::vector<uint8_t> params;

  bool operator==(const EventPacket&) const = default;
};

/// ACL data packet (Vol 4, Part E § 5.4.2). The packet-boundary and
/// broadcast flags are the two 2-bit fields sharing the handle word.
struct AclDataPacket {
  ConnectionHandle handle;
  uint8_t pb_flag = 0;
  uint8_t bc_flag = 0;
  std::vector<uint8_t> payload;

  bool operator==(const AclDataPacket&) const = default;
};

/// SCO data packet (Vol 4, Part E § 5.4.3). Framed for completeness; the
/// simulated controller has no SCO data plane.
struct ScoDataPacket {
  ConnectionHandle handle;
  uint8_t status_flag = 0;
  std::vector<uint8_t> payload;

  bool operator==(const ScoDataPacket&) const = default;
};

using HciPacket =
    std::variant<CommandPacket, EventPacket, AclDataPacket, ScoDataPacket>;

bool is_valid(const CommandPacket& packet);
bool is_valid(const EventPacket& packet);
bool is_valid(const AclDataPacket& packet);
bool is_valid(const ScoDataPacket& packet);
bool is_valid(const HciPacket& packet);

}  // namespace btraw::hci
