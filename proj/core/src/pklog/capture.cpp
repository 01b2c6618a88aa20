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

#include "btraw/pklog/capture.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace btraw::pklog {
namespace {

constexpr uint8_t kHandlePresent = 0x01;

// length(4) is followed by seconds(4) + microseconds(4) + kind(1).
constexpr std::size_t kRecordHeader = 9;
// Body holds at least the handle flag and the message length.
constexpr std::size_t kMinBody = 3;

void append_be32(std::vector<uint8_t>& out, uint32_t value) {
  out.push_back(static_cast<uint8_t>(value >> 24));
  out.push_back(static_cast<uint8_t>(value >> 16));
  out.push_back(static_cast<uint8_t>(value >> 8));
  out.push_back(static_cast<uint8_t>(value));
}

void append_be16(std::vector<uint8_t>& out, uint16_t value) {
  out.push_back(static_cast<uint8_t>(value >> 8));
  out.push_back(static_cast<uint8_t>(value));
}

uint32_t read_be32(std::span<const uint8_t> bytes, std::size_t offset) {
  return (static_cast<uint32_t>(bytes[offset]) << 24) |
         (static_cast<uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<uint32_t>(bytes[offset + 3]);
}

uint16_t read_be16(std::span<const uint8_t> bytes, std::size_t offset) {
  return static_cast<uint16_t>((bytes[offset] << 8) | bytes[offset + 1]);
}

bool known_kind(uint8_t tag) {
  switch (static_cast<RecordKind>(tag)) {
    case RecordKind::kCommand:
    case RecordKind::kEvent:
    case RecordKind::kAclSent:
    case RecordKind::kAclReceived:
    case RecordKind::kNote:
    case RecordKind::kError:
      return true;
  }
  return false;
}

LogTimestamp system_clock_now() {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(now).count();
  LogTimestamp ts;
  ts.seconds = static_cast<uint32_t>(micros / 1'000'000);
  ts.microseconds = static_cast<uint32_t>(micros % 1'000'000);
  return ts;
}

}  // namespace

CaptureLog::CaptureLog() : clock_(system_clock_now) {}

CaptureLog::CaptureLog(Clock clock) : clock_(std::move(clock)) {}

LogTimestamp CaptureLog::now() const { return clock_(); }

std::size_t CaptureLog::append(LogRecord record) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (record.timestamp < last_timestamp_) {
    record.timestamp = last_timestamp_;
  }
  last_timestamp_ = record.timestamp;
  records_.push_back(std::move(record));
  return records_.size() - 1;
}

std::size_t CaptureLog::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return records_.size();
}

std::vector<LogRecord> CaptureLog::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return records_;
}

std::vector<LogRecord> CaptureLog::snapshot_from(std::size_t first) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (first >= records_.size()) {
    return {};
  }
  return {records_.begin() + static_cast<std::ptrdiff_t>(first),
          records_.end()};
}

void CaptureLog::clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  records_.clear();
  last_timestamp_ = {};
}

std::vector<uint8_t> write_capture(std::span<const LogRecord> records) {
  std::vector<uint8_t> out;
  for (const LogRecord& record : records) {
    if (record.message.size() > 0xFFFF) {
      throw std::length_error("capture record message exceeds 65535 bytes");
    }
    const std::size_t body = kMinBody +
                             (record.handle.has_value() ? 2 : 0) +
                             record.message.size() + record.payload.size();
    append_be32(out, static_cast<uint32_t>(kRecordHeader + body));
    append_be32(out, record.timestamp.seconds);
    append_be32(out, record.timestamp.microseconds);
    out.push_back(static_cast<uint8_t>(record.kind));
    out.push_back(record.handle.has_value() ? kHandlePresent : 0x00);
    if (record.handle.has_value()) {
      append_be16(out, record.handle->value());
    }
    append_be16(out, static_cast<uint16_t>(record.message.size()));
    out.insert(out.end(), record.message.begin(), record.message.end());
    out.insert(out.end(), record.payload.begin(), record.payload.end());
  }
  return out;
}

CaptureReadResult read_capture(std::span<const uint8_t> bytes) {
  CaptureReadResult result;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t record_start = pos;
    if (bytes.size() - pos < 4) {
      result.corrupt_offset = record_start;
      return result;
    }
    const uint32_t length = read_be32(bytes, pos);
    pos += 4;
    if (length < kRecordHeader + kMinBody || bytes.size() - pos < length) {
      result.corrupt_offset = record_start;
      return result;
    }
    const std::size_t record_end = pos + length;

    LogRecord record;
    record.timestamp.seconds = read_be32(bytes, pos);
    record.timestamp.microseconds = read_be32(bytes, pos + 4);
    const uint8_t tag = bytes[pos + 8];
    pos += 9;
    if (!known_kind(tag)) {
      result.corrupt_offset = record_start;
      return result;
    }
    record.kind = static_cast<RecordKind>(tag);

    const uint8_t flags = bytes[pos];
    pos += 1;
    if ((flags & ~kHandlePresent) != 0) {
      result.corrupt_offset = record_start;
      return result;
    }
    if (flags & kHandlePresent) {
      if (record_end - pos < 2) {
        result.corrupt_offset = record_start;
        return result;
      }
      const uint16_t raw = read_be16(bytes, pos);
      pos += 2;
      if (raw > hci::ConnectionHandle::kFieldMax) {
        result.corrupt_offset = record_start;
        return result;
      }
      record.handle = hci::ConnectionHandle(raw);
    }
    if (record_end - pos < 2) {
      result.corrupt_offset = record_start;
      return result;
    }
    const uint16_t message_len = read_be16(bytes, pos);
    pos += 2;
    if (record_end - pos < message_len) {
      result.corrupt_offset = record_start;
      return result;
    }
    record.message.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                          bytes.begin() +
                              static_cast<std::ptrdiff_t>(pos + message_len));
    pos += message_len;
    record.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                          bytes.begin() +
                              static_cast<std::ptrdiff_t>(record_end));
    pos = record_end;
    result.records.push_back(std::move(record));
  }
  return result;
}

void write_capture_file(const std::string& path,
                        std::span<const LogRecord> records) {
  const std::vector<uint8_t> bytes = write_capture(records);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open capture file for writing: " + path);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("short write to capture file: " + path);
  }
}

CaptureReadResult read_capture_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open capture file: " + path);
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return read_capture(bytes);
}

}  // namespace btraw::pklog
