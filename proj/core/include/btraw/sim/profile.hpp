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
#include <stdexcept>
#include <string>
#include <string_view>

namespace btraw::sim {

class ProfileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vendor command opcode table. Defaults follow the public conventions for
/// Broadcom-style RAM access commands.
struct VendorOpcodes {
  uint8_t ogf = 0x3F;
  uint16_t write_ram_ocf = 0x4C;
  uint16_t read_ram_ocf = 0x4D;
  uint16_t launch_ram_ocf = 0x4E;

  bool operator==(const VendorOpcodes&) const = default;
};

/// Tunable identity and behavior of one simulated controller. Loadable
/// from a plain-text key-value file (one `key = value` per line, `#`
/// comments).
struct ControllerProfile {
  /// Wire-order device address. When unset, derived from `seed`.
  std::array<uint8_t, 6> bd_addr{};
  bool bd_addr_set = false;

  uint16_t acl_total_credits = 8;
  uint16_t acl_buffer_size = 1021;
  std::string local_name = "btraw-sim";
  VendorOpcodes vendor;
  uint32_t patch_entry = 0x00200000;
  uint64_t seed = 0;

  /// Processing steps between accepting an ACL packet and emitting its
  /// Number of Completed Packets event. 0 completes within the same step.
  uint32_t acl_completion_delay = 0;

  bool operator==(const ControllerProfile&) const = default;
};

/// Parses profile text. Unknown keys and malformed values raise
/// ProfileError naming the offending line.
ControllerProfile parse_profile(std::string_view text);

ControllerProfile load_profile_file(const std::string& path);

}  // namespace btraw::sim
