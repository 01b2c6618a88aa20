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
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "btraw/sim/profile.hpp"

namespace btraw::transport {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The configured backend cannot be reached (connection refused, missing
/// replay file, ...).
class BackendUnavailableError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// The configuration itself is malformed.
class BadConfigError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// Send attempted on a session that is not up.
class TransportDownError : public TransportError {
 public:
  using TransportError::TransportError;
};

enum class TransportKind {
  kInProcessSim,
  kFramedStream,
  kReplay,
};

struct TransportConfig {
  TransportKind kind = TransportKind::kInProcessSim;
  /// Controller identity for the in-process backend.
  sim::ControllerProfile profile;
  /// "host:port" endpoint for the framed-stream backend.
  std::string address;
  /// Capture file for the replay backend.
  std::string capture_path;
  /// Replay at recorded timestamps instead of as fast as possible.
  bool replay_recorded_pacing = false;
};

/// Byte-stream endpoint beneath the dispatch hop. Send and receive carry
/// whole H4 frames exactly as produced by the codec; delivery is
/// packet-atomic even where the underlying stream fragments bytes. Send
/// and receive may be driven from different contexts; inbound frames may
/// arrive after the originating call returned.
class TransportSession {
 public:
  using FrameSink = std::function<void(std::vector<uint8_t>)>;

  virtual ~TransportSession() = default;

  /// Queues one H4 frame toward the controller side. Throws
  /// TransportDownError when the session is not up.
  virtual void send(std::span<const uint8_t> h4_frame) = 0;

  /// Installs the inbound-frame consumer. Frames buffered before a sink
  /// was attached are delivered immediately.
  virtual void set_frame_sink(FrameSink sink) = 0;

  virtual bool is_up() const = 0;
  virtual void close() = 0;

  /// Drives backend-local simulated work (e.g. delayed ACL completions)
  /// to quiescence where the backend supports it. Best effort elsewhere.
  virtual void settle() {}

  /// True when all effects of a send are visible once both send() and
  /// settle() returned, with no cross-thread delivery in flight.
  virtual bool is_synchronous() const { return false; }
};

/// Opens a session for the configured backend. Throws BadConfigError or
/// BackendUnavailableError.
std::unique_ptr<TransportSession> open_transport(const TransportConfig& config);

}  // namespace btraw::transport
