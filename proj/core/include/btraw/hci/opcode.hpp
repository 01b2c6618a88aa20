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

#include <compare>
#include <cstdint>
#include <stdexcept>

namespace btraw::hci {

/// 16-bit HCI command opcode, split into the opcode group field (OGF, 6 bit)
/// and the opcode command field (OCF, 10 bit). Packed wire form is
/// (ogf << 10) | ocf, transmitted little-endian (Vol 4, Part E § 5.4.1).
class Opcode {
 public:
  static constexpr uint8_t kMaxOgf = 0x3F;
  static constexpr uint16_t kMaxOcf = 0x3FF;
  static constexpr uint8_t kVendorOgf = 0x3F;

  constexpr Opcode() = default;

  constexpr Opcode(uint8_t ogf, uint16_t ocf) : ogf_(ogf), ocf_(ocf) {
    if (ogf > kMaxOgf) {
      throw std::invalid_argument("HCI OGF exceeds 6 bits");
    }
    if (ocf > kMaxOcf) {
      throw std::invalid_argument("HCI OCF exceeds 10 bits");
    }
  }

  static constexpr Opcode from_packed(uint16_t packed) {
    return Opcode(static_cast<uint8_t>(packed >> 10),
                  static_cast<uint16_t>(packed & kMaxOcf));
  }

  constexpr uint8_t ogf() const { return ogf_; }
  constexpr uint16_t ocf() const { return ocf_; }
  constexpr uint16_t packed() const {
    return static_cast<uint16_t>((ogf_ << 10) | ocf_);
  }
  constexpr bool is_vendor() const { return ogf_ == kVendorOgf; }

  constexpr auto operator<=>(const Opcode&) const = default;

 private:
  uint8_t ogf_ = 0;
  uint16_t ocf_ = 0;
};

/// Identifier of a live ACL/SCO link. 12-bit field on the wire; values above
/// 0x0EFF are reserved and never name a connection.
class ConnectionHandle {
 public:
  static constexpr uint16_t kFieldMax = 0x0FFF;  // 12-bit wire field
  static constexpr uint16_t kMaxValid = 0x0EFF;  // reserved range excluded

  constexpr ConnectionHandle() = default;

  explicit constexpr ConnectionHandle(uint16_t value) : value_(value) {
    if (value > kFieldMax) {
      throw std::invalid_argument("connection handle exceeds 12 bits");
    }
  }

  constexpr uint16_t value() const { return value_; }

  /// True when the handle is outside the reserved range and may name a link.
  constexpr bool in_valid_range() const { return value_ <= kMaxValid; }

  constexpr auto operator<=>(const ConnectionHandle&) const = default;

 private:
  uint16_t value_ = 0;
};

}  // namespace btraw::hci
