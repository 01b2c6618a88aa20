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

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <thread>

#include "btraw/pklog/capture.hpp"
#include "btraw/pklog/render.hpp"
#include "test_util.hpp"

namespace btraw::pklog {
namespace {

// 2021-04-22 23:44:30 UTC, the wall-clock second shown in the successful
// transmission trace.
constexpr uint32_t kTraceEpoch = 1619135070;

LogRecord acl_sent_record(uint16_t handle, std::size_t length) {
  LogRecord record;
  record.kind = RecordKind::kAclSent;
  record.handle = hci::ConnectionHandle(handle);
  record.message =
      format_acl_data_message(hci::ConnectionHandle(handle), 0x3, length);
  record.payload.assign(length, 0x55);
  return record;
}

TEST(RenderTest, SuccessfulAclSendLine) {
  const auto record = acl_sent_record(0x000B, 16);
  EXPECT_EQ(render_text_tail(record),
            "LEAS Send 0x000B \xE2\x96\xB6 Data [Handle: 0x000B, Packet "
            "Boundary Flags: 0x3, Length: 0x0010 (16)]");
}

TEST(RenderTest, WrongParameterErrorLines) {
  LogRecord error;
  error.kind = RecordKind::kError;
  error.message = format_no_device_handle_error(0x0172);
  EXPECT_EQ(render_text_tail(error),
            "Error ACLPacketToHw No Device Handle 0x172");

  error.message = format_acl_not_sent_error(0x0172);
  EXPECT_EQ(render_text_tail(error),
            "Error Above ACL Packet not sent Handle 0x172");

  // Data messages zero-pad the handle; error messages do not.
  EXPECT_EQ(render_text_tail(acl_sent_record(0x0172, 16)),
            "LEAS Send 0x0172 \xE2\x96\xB6 Data [Handle: 0x0172, Packet "
            "Boundary Flags: 0x3, Length: 0x0010 (16)]");
}

TEST(RenderTest, NocpEventLine) {
  hci::EventPacket nocp;
  nocp.code = 0x13;
  nocp.params = {0x01, 0x0B, 0x00, 0x01, 0x00};
  const LogRecord record = make_event_record({kTraceEpoch, 514000}, nocp);
  EXPECT_EQ(render_text_tail(record),
            "HCI Event 0x000B \xE2\x96\xB6 Number of Completed Packets - "
            "Handle: 0x000B - Packets: 0x0001");
  EXPECT_EQ(render_text(record),
            "Apr 22 23:44:30.514 HCI Event 0x000B \xE2\x96\xB6 Number of "
            "Completed Packets - Handle: 0x000B - Packets: 0x0001");
}

TEST(RenderTest, EmptyNoteKeepsLabelOnly) {
  LogRecord note;
  note.kind = RecordKind::kNote;
  note.timestamp = {kTraceEpoch, 0};
  EXPECT_EQ(render_text_tail(note), "Note");
  EXPECT_EQ(render_text(note), "Apr 22 23:44:30.000 Note");
}

TEST(RenderTest, TimestampFormatsDotSeparatedUtc) {
  EXPECT_EQ(format_timestamp({kTraceEpoch, 514000}), "Apr 22 23:44:30.514");
  EXPECT_EQ(format_timestamp({kTraceEpoch, 514999}), "Apr 22 23:44:30.514");
  EXPECT_EQ(format_timestamp({0, 0}), "Jan 01 00:00:00.000");
}

TEST(RenderTest, TimestampParserAcceptsBothSeparators) {
  const auto dotted = parse_text_timestamp("23:44:30.514");
  ASSERT_TRUE(dotted.has_value());
  EXPECT_EQ(dotted->hour, 23);
  EXPECT_EQ(dotted->millisecond, 514);

  // Colon-separated milliseconds appear in the error-trace variant.
  const auto colons = parse_text_timestamp("23:40:49:668");
  ASSERT_TRUE(colons.has_value());
  EXPECT_EQ(colons->minute, 40);
  EXPECT_EQ(colons->millisecond, 668);

  const auto with_date = parse_text_timestamp("Apr 22 23:40:49:668");
  ASSERT_TRUE(with_date.has_value());
  EXPECT_EQ(with_date->month, 4);
  EXPECT_EQ(with_date->day, 22);

  EXPECT_FALSE(parse_text_timestamp("23:40:49").has_value());
  EXPECT_FALSE(parse_text_timestamp("23:40:49.66").has_value());
  EXPECT_FALSE(parse_text_timestamp("xx:40:49.668").has_value());
}

TEST(RenderTest, AclRenderInjectiveOverHandleAndLength) {
  std::set<std::string> lines;
  int count = 0;
  for (uint16_t handle : {0x000B, 0x000C, 0x0172, 0x0EFF}) {
    for (std::size_t length : {1u, 16u, 255u, 1021u}) {
      lines.insert(render_text_tail(acl_sent_record(handle, length)));
      ++count;
    }
  }
  EXPECT_EQ(lines.size(), static_cast<std::size_t>(count));
}

TEST(RecordTest, ValidityRules) {
  LogRecord acl;
  acl.kind = RecordKind::kAclSent;
  EXPECT_FALSE(is_valid(acl));  // ACL records need a handle
  acl.handle = hci::ConnectionHandle(1);
  EXPECT_TRUE(is_valid(acl));

  LogRecord error;
  error.kind = RecordKind::kError;
  EXPECT_FALSE(is_valid(error));  // errors need a message
  error.message = "boom";
  EXPECT_TRUE(is_valid(error));

  LogRecord note;
  note.timestamp.microseconds = 1'000'000;
  EXPECT_FALSE(is_valid(note));
}

TEST(CaptureLogTest, TimestampsNeverRegress) {
  uint32_t fake_second = 100;
  CaptureLog log([&fake_second] { return LogTimestamp{fake_second, 0}; });

  LogRecord note;
  note.kind = RecordKind::kNote;
  note.timestamp = log.now();
  log.append(note);

  fake_second = 50;  // clock jumps backwards
  note.timestamp = log.now();
  log.append(note);

  const auto records = log.snapshot();
  ASSERT_EQ(records.size(), 2u);
  EXPECT_LE(records[0].timestamp, records[1].timestamp);
}

TEST(CaptureLogTest, ConcurrentAppendsAllLand) {
  CaptureLog log(testutil::fixed_clock(0));
  constexpr int kPerThread = 500;
  auto writer = [&log] {
    for (int i = 0; i < kPerThread; ++i) {
      LogRecord note;
      note.kind = RecordKind::kNote;
      note.message = "n";
      note.timestamp = log.now();
      log.append(note);
    }
  };
  std::thread a(writer);
  std::thread b(writer);
  a.join();
  b.join();
  EXPECT_EQ(log.size(), 2u * kPerThread);
  const auto records = log.snapshot();
  for (std::size_t i = 1; i < records.size(); ++i) {
    ASSERT_LE(records[i - 1].timestamp, records[i].timestamp);
  }
}

TEST(CaptureFileTest, EmptyListIsEmptyFile) {
  EXPECT_TRUE(write_capture({}).empty());
  const auto result = read_capture({});
  EXPECT_TRUE(result.ok());
  EXPECT_TRUE(result.records.empty());
}

TEST(CaptureFileTest, RoundTripsRandomRecordLists) {
  std::mt19937_64 rng(0xCAFE);
  for (int iteration = 0; iteration < 50; ++iteration) {
    std::vector<LogRecord> records;
    const std::size_t count = rng() % 20;
    for (std::size_t i = 0; i < count; ++i) {
      records.push_back(testutil::random_record(rng));
    }
    const auto bytes = write_capture(records);
    const auto result = read_capture(bytes);
    ASSERT_TRUE(result.ok());
    ASSERT_EQ(result.records, records);
  }
}

TEST(CaptureFileTest, RoundTripsMaxLengthMessage) {
  LogRecord record;
  record.kind = RecordKind::kNote;
  record.message.assign(0xFFFF, 'm');
  const std::vector<LogRecord> records = {record};
  const auto result = read_capture(write_capture(records));
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result.records, records);
}

TEST(CaptureFileTest, TruncationAtEveryOffsetNeverMisparses) {
  std::mt19937_64 rng(0xB0B);
  std::vector<LogRecord> records;
  for (int i = 0; i < 6; ++i) {
    records.push_back(testutil::random_record(rng));
  }
  const auto bytes = write_capture(records);

  // Record boundaries, for deciding what a clean cut should recover.
  std::vector<std::size_t> boundaries = {0};
  {
    std::size_t pos = 0;
    for (const auto& record : records) {
      const auto one = write_capture({&record, 1});
      pos += one.size();
      boundaries.push_back(pos);
    }
  }

  for (std::size_t cut = 0; cut <= bytes.size(); ++cut) {
    const auto result = read_capture(
        std::span<const uint8_t>(bytes.data(), cut));
    std::size_t complete = 0;
    while (complete + 1 < boundaries.size() &&
           boundaries[complete + 1] <= cut) {
      ++complete;
    }
    ASSERT_EQ(result.records.size(), complete) << "cut at " << cut;
    for (std::size_t i = 0; i < complete; ++i) {
      ASSERT_EQ(result.records[i], records[i]);
    }
    if (cut == boundaries[complete]) {
      EXPECT_TRUE(result.ok()) << "clean cut at " << cut;
    } else {
      ASSERT_TRUE(result.corrupt_offset.has_value()) << "cut at " << cut;
      EXPECT_EQ(*result.corrupt_offset, boundaries[complete]);
    }
  }
}

TEST(CaptureFileTest, InconsistentMessageLengthIsCorrupt) {
  LogRecord record;
  record.kind = RecordKind::kNote;
  record.message = "hello";
  auto bytes = write_capture({&record, 1});
  // The message length sits after length(4) + header(9) + flags(1).
  bytes[4 + 9 + 1 + 1] = 0xFF;
  const auto result = read_capture(bytes);
  EXPECT_FALSE(result.ok());
  EXPECT_EQ(*result.corrupt_offset, 0u);
  EXPECT_TRUE(result.records.empty());
}

TEST(CaptureFileTest, UnknownKindTagIsCorrupt) {
  LogRecord record;
  record.kind = RecordKind::kNote;
  auto bytes = write_capture({&record, 1});
  bytes[4 + 8] = 0x55;  // kind tag byte
  const auto result = read_capture(bytes);
  EXPECT_FALSE(result.ok());
}

TEST(CaptureFileTest, FileHelpersRoundTrip) {
  std::mt19937_64 rng(0xF11E);
  std::vector<LogRecord> records;
  for (int i = 0; i < 5; ++i) {
    records.push_back(testutil::random_record(rng));
  }
  const std::string path = ::testing::TempDir() + "/capture_roundtrip.pklg";
  write_capture_file(path, records);
  const auto result = read_capture_file(path);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result.records, records);
}

}  // namespace
}  // namespace btraw::pklog
