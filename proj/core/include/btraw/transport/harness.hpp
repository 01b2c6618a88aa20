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

#include <chrono>
#include <string>
#include <vector>

#include "btraw/hci/packet.hpp"
#include "btraw/pklog/record.hpp"
#include "btraw/transport/transport.hpp"

namespace btraw::transport {

/// One step of a deterministic scenario script.
struct ScenarioStep {
  enum class Kind { kRawCommand, kRawAcl };

  Kind kind = Kind::kRawCommand;
  hci::Opcode opcode;           // kRawCommand
  std::vector<uint8_t> bytes;   // command params or ACL payload
  uint16_t handle = 0;          // kRawAcl

  static ScenarioStep command(hci::Opcode opcode,
                              std::vector<uint8_t> params = {});
  static ScenarioStep acl(uint16_t handle, std::vector<uint8_t> payload);
};

using Scenario = std::vector<ScenarioStep>;

struct BackendSpec {
  std::string label;
  TransportConfig config;
};

struct BackendTranscript {
  std::string label;
  /// Decoded inbound packets in delivery order.
  std::vector<hci::HciPacket> inbound;
  /// Capture records produced by the run.
  std::vector<pklog::LogRecord> capture;
};

/// Runs the same scenario against each backend and returns the decoded
/// event transcript per backend, for equality comparison. Backend errors
/// propagate.
std::vector<BackendTranscript> transport_equivalence_harness(
    const Scenario& scenario, const std::vector<BackendSpec>& backends,
    std::chrono::milliseconds quiescence = std::chrono::milliseconds(150));

/// Byte-level equality of two transcripts' inbound packet sequences.
bool transcripts_equal(const BackendTranscript& a, const BackendTranscript& b);

}  // namespace btraw::transport
