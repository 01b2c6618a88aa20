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

#include <optional>
#include <string>
#include <string_view>

#include "btraw/hci/packet.hpp"
#include "btraw/pklog/record.hpp"

namespace btraw::pklog {

/// One text line per record: `<timestamp> <kind-label> [<handle>] <message>`.
/// Packet kinds carry a marker between the header columns and the message.
std::string render_text(const LogRecord& record);

/// render_text without the timestamp column. Golden-trace comparisons pin
/// this form; timestamps are excluded by contract.
std::string render_text_tail(const LogRecord& record);

/// "Apr 22 23:44:30.514" (UTC, dot-separated milliseconds).
std::string format_timestamp(LogTimestamp ts);

struct TextTimestamp {
  int month = 0;  // 1-12, 0 when the date prefix is absent
  int day = 0;
  int hour = 0;
  int minute = 0;
  int second = 0;
  int millisecond = 0;

  bool operator==(const TextTimestamp&) const = default;
};

/// Parses a rendered timestamp column. Accepts both dot- and
/// colon-separated milliseconds, with or without the "Mon DD " prefix.
std::optional<TextTimestamp> parse_text_timestamp(std::string_view text);

// Message texts observed in vendor PacketLogger output, frozen here so
// every producer emits identical strings. Handles are zero-padded to four
// digits in data messages and printed without leading zeros in error
// messages.
std::string format_acl_data_message(hci::ConnectionHandle handle,
                                    uint8_t pb_flag, std::size_t length);
std::string format_nocp_message(hci::ConnectionHandle handle,
                                uint16_t packets);
std::string format_no_device_handle_error(uint32_t handle);
std::string format_acl_not_sent_error(uint32_t handle);

/// Human summary of a command for capture records. Known opcodes get their
/// names; vendor opcodes fall back to "Vendor Command 0x%04X".
std::string command_summary(hci::Opcode opcode);

/// Human summary of an event for capture records. The Number of Completed
/// Packets text matches format_nocp_message exactly.
std::string event_summary(const hci::EventPacket& event);

/// Builds the capture record for an inbound event: summary message, handle
/// extracted for connection-scoped events, payload = unframed event bytes.
LogRecord make_event_record(LogTimestamp ts, const hci::EventPacket& event);

}  // namespace btraw::pklog
