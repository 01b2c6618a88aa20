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
#include <optional>
#include <string>
#include <vector>

#include "btraw/hci/opcode.hpp"

namespace btraw::pklog {

/// Record kinds. Values double as the binary capture tag byte.
enum class RecordKind : uint8_t {
  kCommand = 0x00,
  kEvent = 0x01,
  kAclSent = 0x02,
  kAclReceived = 0x03,
  kNote = 0x06,
  kError = 0x07,
};

const char* kind_label(RecordKind kind);

struct LogTimestamp {
  uint32_t seconds = 0;       // Unix epoch
  uint32_t microseconds = 0;  // < 1'000'000

  auto operator<=>(const LogTimestamp&) const = default;
};

/// One capture entry. Payload semantics by kind:
///  - kCommand: the unframed raw command buffer (opcode, length, params).
///  - kEvent / kAclReceived: the unframed wire packet as delivered, so a
///    capture can be replayed as an inbound packet source.
///  - kAclSent: the payload bytes the caller handed to the raw-send API.
///  - kNote / kError: usually empty.
struct LogRecord {
  LogTimestamp timestamp;
  RecordKind kind = RecordKind::kNote;
  std::optional<hci::ConnectionHandle> handle;
  std::string message;
  std::vector<uint8_t> payload;

  bool operator==(const LogRecord&) const = default;
};

/// ACL records carry a handle; Error records carry a non-empty message.
bool is_valid(const LogRecord& record);

/// Same record modulo capture time. Used wherever golden comparisons
/// exclude the timestamp column.
bool equal_ignoring_timestamp(const LogRecord& a, const LogRecord& b);

}  // namespace btraw::pklog
