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
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "btraw/pklog/record.hpp"

namespace btraw::pklog {

/// Recording sink. Multiple producers may append concurrently; an internal
/// sequence fixes the total order and timestamps are clamped to be
/// non-decreasing within the capture.
class CaptureLog {
 public:
  using Clock = std::function<LogTimestamp()>;

  CaptureLog();
  explicit CaptureLog(Clock clock);

  LogTimestamp now() const;

  /// Appends and returns the record's sequence index.
  std::size_t append(LogRecord record);

  std::size_t size() const;
  std::vector<LogRecord> snapshot() const;
  /// Records appended at or after sequence index `first`.
  std::vector<LogRecord> snapshot_from(std::size_t first) const;
  void clear();

 private:
  mutable std::mutex mutex_;
  Clock clock_;
  LogTimestamp last_timestamp_{};
  std::vector<LogRecord> records_;
};

/// Serialized capture. Per-record framing: big-endian 32-bit length of the
/// remainder of the record, 32-bit seconds, 32-bit microseconds, one kind
/// tag byte, then the record body (handle flag, optional big-endian handle,
/// big-endian message length, message bytes, payload bytes).
std::vector<uint8_t> write_capture(std::span<const LogRecord> records);

struct CaptureReadResult {
  std::vector<LogRecord> records;
  /// Byte offset of the record whose length fields are inconsistent with
  /// the input, when one exists. Records before it are fully recovered.
  std::optional<std::size_t> corrupt_offset;

  bool ok() const { return !corrupt_offset.has_value(); }
};

CaptureReadResult read_capture(std::span<const uint8_t> bytes);

void write_capture_file(const std::string& path,
                        std::span<const LogRecord> records);
CaptureReadResult read_capture_file(const std::string& path);

}  // namespace btraw::pklog
