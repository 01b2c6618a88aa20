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
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "btraw/dispatch/session.hpp"
#include "btraw/pklog/record.hpp"

namespace btraw::probe {

/// Parameter roles of the raw ACL send contract: payload pointer, byte
/// count, connection handle, opaque request identifier.
enum class Role : uint8_t { kData, kSize, kHandle, kRequest };

const char* role_name(Role role);

/// A positional argument: scalar or byte buffer.
using ProbeValue = std::variant<uint32_t, std::vector<uint8_t>>;

/// Maps caller positions to indices into a role list. Lexicographic order
/// over these vectors is the probe search order.
using Permutation = std::vector<std::size_t>;

/// Classification of the capture records one probe produced.
enum class Feedback : uint8_t {
  /// An ACL send entry followed by its matching completion event.
  kSuccess,
  /// The hardware layer rejected the handle ("No Device Handle").
  kNoDeviceHandle,
  /// A validation error other than an unknown handle.
  kMalformed,
  /// Nothing observable.
  kSilent,
};

const char* feedback_name(Feedback feedback);

Feedback classify_feedback(std::span<const pklog::LogRecord> window);

/// A function taking positional values and performing a raw send through a
/// hidden internal permutation of those positions. The permutation is
/// fixed for the callable's lifetime.
struct BlackBoxCallable {
  std::size_t arity = 0;
  std::function<void(std::span<const ProbeValue>)> invoke;
};

/// Builds a black box over `session` whose position->role mapping is
/// `hidden`. Values landing in a mistyped slot degrade the way a C call
/// through a wrong signature would: a scalar in the buffer slot reads as
/// no data, a buffer in a scalar slot reads as an invalid 0xFFFFFFFF, and
/// a size that disagrees with the buffer voids the read. Roles absent
/// from `roles` are bound correctly from `fixed_payload` and the live
/// connection state.
BlackBoxCallable make_hidden_send(dispatch::RawDispatchSession& session,
                                  std::span<const Role> roles,
                                  Permutation hidden, uint16_t live_handle,
                                  std::vector<uint8_t> fixed_payload);

/// Probe values, pairwise distinct and role-distinguishable: the session's
/// one live handle, a well-formed but dead handle value for the request
/// role, and a tagged non-empty payload.
struct Sentinels {
  uint16_t live_handle = 0;
  uint32_t request_value = 0x0172;
  std::vector<uint8_t> data_tag;
};

Sentinels default_sentinels(uint16_t live_handle);

struct ProbeOptions {
  /// Use misplaced-sentinel evidence to skip candidates that cannot be the
  /// hidden permutation. Off by default: plain lexicographic trial.
  bool adaptive_pruning = false;
  /// Log-settlement window per probe; immediate on in-process transports.
  std::chrono::milliseconds settle_window{100};
};

struct ProbeEvidence {
  Permutation tried;
  Feedback observed = Feedback::kSilent;

  bool operator==(const ProbeEvidence&) const = default;
};

struct ProbeVerdict {
  bool decided = false;
  /// Position->role mapping that produced Success; valid iff decided.
  Permutation permutation;
  std::size_t probes_used = 0;
  std::vector<ProbeEvidence> evidence;
};

/// Enumerates candidate permutations in lexicographic order, invokes the
/// callable with sentinels placed per candidate, classifies the log
/// feedback, and stops at the first Success. Every probe is recorded as a
/// Note in the session capture. Undecided after arity! probes means the
/// callable never produced a Success signature.
ProbeVerdict infer_arg_order(const BlackBoxCallable& callable,
                             std::span<const Role> roles,
                             dispatch::RawDispatchSession& session,
                             const Sentinels& sentinels,
                             const ProbeOptions& options = {});

/// Multi-line human-readable evidence table.
std::string render_evidence_table(std::span<const Role> roles,
                                  const ProbeVerdict& verdict);

}  // namespace btraw::probe
