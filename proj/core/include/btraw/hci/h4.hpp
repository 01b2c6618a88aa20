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
#include <optional>
#include <span>
#include <vector>

#include "btraw/hci/packet.hpp"

namespace btraw::hci {

// H4 packet-type indicators (Vol 4, Part A § 2).
inline constexpr uint8_t kIndicatorCommand = 0x01;
inline constexpr uint8_t kIndicatorAclData = 0x02;
inline constexpr uint8_t kIndicatorScoData = 0x03;
inline constexpr uint8_t kIndicatorEvent = 0x04;

enum class DecodeStatus : uint8_t {
  kOk,
  /// Input is a truncated prefix of a valid packet. Resumption signal, not
  /// a failure: feed more bytes and retry.
  kNeedMoreData,
  /// First byte is not a known H4 indicator; the stream is desynchronized.
  kUnknownIndicator,
  /// A declared length field violates the packet type's invariants.
  kLengthOverflow,
};

struct DecodeResult {
  DecodeStatus status = DecodeStatus::kNeedMoreData;
  std::optional<HciPacket> packet;  // engaged iff status == kOk
  std::size_t consumed = 0;         // bytes consumed from the input iff kOk
  uint8_t indicator = 0;            // offending byte iff kUnknownIndicator

  bool ok() const { return status == DecodeStatus::kOk; }
};

/// Serializes a packet into one H4 frame: indicator byte, little-endian
/// header, body. Deterministic. Throws std::invalid_argument if the packet
/// violates its type invariants.
std::vector<uint8_t> encode_h4(const HciPacket& packet);

/// Decodes the first complete H4 frame out of `stream`. Inverse of
/// encode_h4 on well-formed prefixes; the unconsumed tail starts at
/// `consumed`. Never throws.
DecodeResult decode_h4(std::span<const uint8_t> stream);

/// Unframed raw command buffer as accepted by the raw-send dispatch path:
/// 2-byte little-endian opcode, 1-byte parameter length, parameters.
/// Throws std::length_error when params exceed kMaxCommandParams.
std::vector<uint8_t> raw_command_buffer(Opcode opcode,
                                        std::span<const uint8_t> params);

/// Incremental H4 decoder for serial-style transports. Feed arbitrary
/// stream fragments; next() yields the same packet sequence regardless of
/// segmentation. Single-owner: one decoder per stream, no internal locking.
class H4StreamDecoder {
 public:
  void feed(std::span<const uint8_t> bytes);

  /// Decodes the next buffered frame. kNeedMoreData when the buffer holds
  /// no complete packet. Error statuses are sticky: a desynchronized
  /// stream keeps reporting the same error without consuming bytes.
  DecodeResult next();

  std::size_t buffered() const { return buffer_.size() - read_pos_; }

 private:
  std::vector<uint8_t> buffer_;
  std::size_t read_pos_ = 0;
};

}  // namespace btraw::hci
