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

#include "btraw/pklog/render.hpp"

#include <cctype>
#include <cstdarg>
#include <cstdio>
#include <ctime>

#include "btraw/hci/constants.hpp"

namespace btraw::pklog {
namespace {

// Marker printed between the header columns and the message of packet rows.
constexpr const char* kPayloadMarker = "\xE2\x96\xB6";  // U+25B6

constexpr const char* kMonthNames[12] = {"Jan", "Feb", "Mar", "Apr",
                                         "May", "Jun", "Jul", "Aug",
                                         "Sep", "Oct", "Nov", "Dec"};

std::string printf_string(const char* fmt, ...)
    __attribute__((format(printf, 1, 2)));

std::string printf_string(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

bool is_packet_kind(RecordKind kind) {
  switch (kind) {
    case RecordKind::kCommand:
    case RecordKind::kEvent:
    case RecordKind::kAclSent:
    case RecordKind::kAclReceived:
      return true;
    case RecordKind::kNote:
    case RecordKind::kError:
      return false;
  }
  return false;
}

uint16_t read_le16(const std::vector<uint8_t>& bytes, std::size_t offset) {
  return static_cast<uint16_t>(bytes[offset] |
                               (static_cast<uint16_t>(bytes[offset + 1]) << 8));
}

}  // namespace

const char* kind_label(RecordKind kind) {
  switch (kind) {
    case RecordKind::kCommand:
      return "HCI Command";
    case RecordKind::kEvent:
      return "HCI Event";
    case RecordKind::kAclSent:
      return "LEAS Send";
    case RecordKind::kAclReceived:
      return "LEAS Receive";
    case RecordKind::kNote:
      return "Note";
    case RecordKind::kError:
      return "Error";
  }
  return "Unknown";
}

bool is_valid(const LogRecord& record) {
  if (record.timestamp.microseconds >= 1'000'000) {
    return false;
  }
  if ((record.kind == RecordKind::kAclSent ||
       record.kind == RecordKind::kAclReceived) &&
      !record.handle.has_value()) {
    return false;
  }
  if (record.kind == RecordKind::kError && record.message.empty()) {
    return false;
  }
  return true;
}

bool equal_ignoring_timestamp(const LogRecord& a, const LogRecord& b) {
  return a.kind == b.kind && a.handle == b.handle && a.message == b.message &&
         a.payload == b.payload;
}

std::string render_text_tail(const LogRecord& record) {
  std::string line = kind_label(record.kind);
  if (record.handle.has_value()) {
    line += printf_string(" 0x%04X", record.handle->value());
  }
  if (is_packet_kind(record.kind)) {
    line += ' ';
    line += kPayloadMarker;
  }
  if (!record.message.empty()) {
    line += ' ';
    line += record.message;
  }
  return line;
}

std::string render_text(const LogRecord& record) {
  return format_timestamp(record.timestamp) + ' ' + render_text_tail(record);
}

std::string format_timestamp(LogTimestamp ts) {
  const time_t seconds = static_cast<time_t>(ts.seconds);
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  return printf_string("%s %02d %02d:%02d:%02d.%03u",
                       kMonthNames[tm.tm_mon], tm.tm_mday, tm.tm_hour,
                       tm.tm_min, tm.tm_sec, ts.microseconds / 1000);
}

std::optional<TextTimestamp> parse_text_timestamp(std::string_view text) {
  TextTimestamp out;
  // Optional "Mon DD " prefix.
  if (!text.empty() && std::isalpha(static_cast<unsigned char>(text[0]))) {
    if (text.size() < 7) return std::nullopt;
    const std::string_view month = text.substr(0, 3);
    out.month = 0;
    for (int i = 0; i < 12; ++i) {
      if (month == kMonthNames[i]) {
        out.month = i + 1;
        break;
      }
    }
    if (out.month == 0 || text[3] != ' ') return std::nullopt;
    std::size_t pos = 4;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      out.day = out.day * 10 + (text[pos] - '0');
      ++pos;
    }
    if (out.day < 1 || out.day > 31 || pos >= text.size() ||
        text[pos] != ' ') {
      return std::nullopt;
    }
    text.remove_prefix(pos + 1);
  }

  // HH:MM:SS followed by '.' or ':' and three millisecond digits. The
  // colon-separated form appears in vendor logs alongside the dotted one.
  int fields[4] = {0, 0, 0, 0};
  std::size_t pos = 0;
  for (int f = 0; f < 4; ++f) {
    int digits = 0;
    int value = 0;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      value = value * 10 + (text[pos] - '0');
      ++pos;
      ++digits;
    }
    const int expected = (f == 3) ? 3 : 2;
    if (digits != expected) return std::nullopt;
    fields[f] = value;
    if (f < 3) {
      if (pos >= text.size()) return std::nullopt;
      const char sep = text[pos];
      if (f < 2 ? sep != ':' : (sep != ':' && sep != '.')) {
        return std::nullopt;
      }
      ++pos;
    }
  }
  if (pos != text.size()) return std::nullopt;
  if (fields[0] > 23 || fields[1] > 59 || fields[2] > 60) return std::nullopt;
  out.hour = fields[0];
  out.minute = fields[1];
  out.second = fields[2];
  out.millisecond = fields[3];
  return out;
}

std::string format_acl_data_message(hci::ConnectionHandle handle,
                                    uint8_t pb_flag, std::size_t length) {
  return printf_string(
      "Data [Handle: 0x%04X, Packet Boundary Flags: 0x%X, Length: 0x%04X "
      "(%u)]",
      handle.value(), pb_flag, static_cast<unsigned>(length),
      static_cast<unsigned>(length));
}

std::string format_nocp_message(hci::ConnectionHandle handle,
                                uint16_t packets) {
  return printf_string(
      "Number of Completed Packets - Handle: 0x%04X - Packets: 0x%04X",
      handle.value(), packets);
}

std::string format_no_device_handle_error(uint32_t handle) {
  return printf_string("ACLPacketToHw No Device Handle 0x%X", handle);
}

std::string format_acl_not_sent_error(uint32_t handle) {
  return printf_string("Above ACL Packet not sent Handle 0x%X", handle);
}

std::string command_summary(hci::Opcode opcode) {
  switch (opcode.packed()) {
    case 0x0405:
      return "Create Connection";
    case 0x0406:
      return "Disconnect";
    case 0x0C03:
      return "Reset";
    case 0x0C14:
      return "Read Local Name";
    case 0x1009:
      return "Read BD_ADDR";
    default:
      break;
  }
  if (opcode.is_vendor()) {
    return printf_string("Vendor Command 0x%04X", opcode.packed());
  }
  return printf_string("Opcode 0x%04X", opcode.packed());
}

std::string event_summary(const hci::EventPacket& event) {
  const auto& p = event.params;
  switch (event.code) {
    case hci::kEventCommandComplete: {
      if (p.size() < 4) break;
      const uint16_t opcode = read_le16(p, 1);
      const uint8_t status = p[3];
      std::string text = printf_string(
          "Command Complete - Opcode: 0x%04X - Status: 0x%02X", opcode,
          status);
      if (opcode == hci::kOpcodeReadLocalName.packed() && p.size() > 4 &&
          status == hci::kStatusSuccess) {
        std::string name;
        for (std::size_t i = 4; i < p.size() && p[i] != 0; ++i) {
          name += static_cast<char>(p[i]);
        }
        text += " - Name: " + name;
      }
      return text;
    }
    case hci::kEventCommandStatus: {
      if (p.size() < 4) break;
      return printf_string("Command Status - Opcode: 0x%04X - Status: 0x%02X",
                           read_le16(p, 2), p[0]);
    }
    case hci::kEventConnectionComplete: {
      if (p.size() < 3) break;
      return printf_string(
          "Connection Complete - Handle: 0x%04X - Status: 0x%02X",
          read_le16(p, 1), p[0]);
    }
    case hci::kEventDisconnectionComplete: {
      if (p.size() < 4) break;
      return printf_string(
          "Disconnection Complete - Handle: 0x%04X - Reason: 0x%02X",
          read_le16(p, 1), p[3]);
    }
    case hci::kEventNumberOfCompletedPackets: {
      if (p.size() < 5) break;
      return format_nocp_message(
          hci::ConnectionHandle(read_le16(p, 1) & hci::ConnectionHandle::kFieldMax),
          read_le16(p, 3));
    }
    default:
      break;
  }
  return printf_string("Event 0x%02X", event.code);
}

LogRecord make_event_record(LogTimestamp ts, const hci::EventPacket& event) {
  LogRecord record;
  record.timestamp = ts;
  record.kind = RecordKind::kEvent;
  record.message = event_summary(event);

  const auto& p = event.params;
  switch (event.code) {
    case hci::kEventConnectionComplete:
      if (p.size() >= 3) {
        record.handle = hci::ConnectionHandle(
            read_le16(p, 1) & hci::ConnectionHandle::kFieldMax);
      }
      break;
    case hci::kEventDisconnectionComplete:
      if (p.size() >= 4) {
        record.handle = hci::ConnectionHandle(
            read_le16(p, 1) & hci::ConnectionHandle::kFieldMax);
      }
      break;
    case hci::kEventNumberOfCompletedPackets:
      if (p.size() >= 5) {
        record.handle = hci::ConnectionHandle(
            read_le16(p, 1) & hci::ConnectionHandle::kFieldMax);
      }
      break;
    default:
      break;
  }

  record.payload.reserve(2 + p.size());
  record.payload.push_back(event.code);
  record.payload.push_back(static_cast<uint8_t>(p.size()));
  record.payload.insert(record.payload.end(), p.begin(), p.end());
  return record;
}

}  // namespace btraw::pklog
