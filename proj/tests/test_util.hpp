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
#include <random>
#include <vector>

#include "btraw/hci/packet.hpp"
#include "btraw/pklog/capture.hpp"
#include "btraw/pklog/record.hpp"

namespace btraw::testutil {

inline std::vector<uint8_t> random_bytes(std::mt19937_64& rng,
                                         std::size_t count) {
  std::vector<uint8_t> out(count);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& b : out) {
    b = static_cast<uint8_t>(byte(rng));
  }
  return out;
}

/// Uniformly random valid packet across all four variants. Sizes are kept
/// modest so large sweeps stay fast.
inline hci::HciPacket random_packet(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> variant(0, 3);
  std::uniform_int_distribution<int> small_len(0, 40);
  std::uniform_int_distribution<int> flag(0, 3);
  std::uniform_int_distribution<uint16_t> handle(
      0, hci::ConnectionHandle::kMaxValid);
  std::uniform_int_distribution<uint16_t> packed16(0, 0xFFFF);

  switch (variant(rng)) {
    case 0: {
      hci::CommandPacket cmd;
      cmd.opcode = hci::Opcode::from_packed(packed16(rng));
      cmd.params = random_bytes(rng, static_cast<std::size_t>(small_len(rng)));
      return cmd;
    }
    case 1: {
      hci::EventPacket event;
      event.code = static_cast<uint8_t>(packed16(rng) & 0xFF);
      event.params =
          random_bytes(rng, static_cast<std::size_t>(small_len(rng)));
      return event;
    }
    case 2: {
      hci::AclDataPacket acl;
      acl.handle = hci::ConnectionHandle(handle(rng));
      acl.pb_flag = static_cast<uint8_t>(flag(rng));
      acl.bc_flag = static_cast<uint8_t>(flag(rng));
      acl.payload =
          random_bytes(rng, static_cast<std::size_t>(small_len(rng)) * 3);
      return acl;
    }
    default: {
      hci::ScoDataPacket sco;
      sco.handle = hci::ConnectionHandle(handle(rng));
      sco.status_flag = static_cast<uint8_t>(flag(rng));
      sco.payload =
          random_bytes(rng, static_cast<std::size_t>(small_len(rng)));
      return sco;
    }
  }
}

/// Random valid capture record, messages composed through the production
/// formatters where the kind calls for one.
inline pklog::LogRecord random_record(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind_pick(0, 5);
  std::uniform_int_distribution<int> len(0, 64);
  std::uniform_int_distribution<uint16_t> handle(
      0, hci::ConnectionHandle::kMaxValid);
  std::uniform_int_distribution<uint32_t> seconds(0, 0x7FFFFFFF);
  std::uniform_int_distribution<uint32_t> micros(0, 999'999);

  static constexpr pklog::RecordKind kKinds[] = {
      pklog::RecordKind::kCommand,     pklog::RecordKind::kEvent,
      pklog::RecordKind::kAclSent,     pklog::RecordKind::kAclReceived,
      pklog::RecordKind::kNote,        pklog::RecordKind::kError,
  };

  pklog::LogRecord record;
  record.kind = kKinds[kind_pick(rng)];
  record.timestamp = {seconds(rng), micros(rng)};
  record.payload = random_bytes(rng, static_cast<std::size_t>(len(rng)));

  const auto text_len = static_cast<std::size_t>(len(rng));
  record.message.assign(text_len, 'x');
  for (auto& c : record.message) {
    c = static_cast<char>('a' + (rng() % 26));
  }

  if (record.kind == pklog::RecordKind::kAclSent ||
      record.kind == pklog::RecordKind::kAclReceived) {
    record.handle = hci::ConnectionHandle(handle(rng));
  } else if (rng() % 2 == 0 && record.kind == pklog::RecordKind::kEvent) {
    record.handle = hci::ConnectionHandle(handle(rng));
  }
  if (record.kind == pklog::RecordKind::kError && record.message.empty()) {
    record.message = "e";
  }
  return record;
}

/// Deterministic capture clock ticking one millisecond per record.
inline pklog::CaptureLog::Clock fixed_clock(uint32_t start_seconds) {
  auto counter = std::make_shared<uint32_t>(0);
  return [start_seconds, counter]() {
    const uint32_t tick = (*counter)++;
    return pklog::LogTimestamp{start_seconds + tick / 1000,
                               (tick % 1000) * 1000};
  };
}

}  // namespace btraw::testutil
