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
#include <iosfwd>
#include <memory>
#include <string>

#include "btraw/dispatch/session.hpp"
#include "btraw/pklog/capture.hpp"
#include "btraw/transport/transport.hpp"

namespace btraw::shell {

struct ShellConfig {
  transport::TransportConfig transport;
  /// When set, the capture is auto-exported here on exit.
  std::string capture_export_path;
  /// Settlement window for asynchronous backends before events print.
  std::chrono::milliseconds event_window{150};
};

/// Interactive and scripted driver for the raw-access stack. Both modes
/// share one command path, so identical command sequences produce
/// identical capture logs modulo timestamps.
///
/// Single thread of control: asynchronous events are queued and printed
/// between prompts.
class Shell {
 public:
  /// Opens the configured transport. Transport exceptions propagate;
  /// callers map them to setup-failure exit codes.
  Shell(ShellConfig config, std::ostream& out, std::ostream& err);

  enum class CommandResult { kOk, kFailed, kParseError, kQuit };

  CommandResult execute_line(const std::string& line);

  /// Interactive loop; returns a process exit code (0, or 2 when the
  /// configured capture export fails).
  int run_repl(std::istream& in);

  /// Batch mode: stops at the first failing command and reports its line
  /// number. Exit code 0 on success, 1 on command failure, 2 on export
  /// failure.
  int run_script(std::istream& script);

  dispatch::RawDispatchSession& session() { return *session_; }
  const std::shared_ptr<pklog::CaptureLog>& capture() const {
    return capture_;
  }

 private:
  CommandResult cmd_connect(const std::vector<std::string>& args);
  CommandResult cmd_send_hci(const std::vector<std::string>& args);
  CommandResult cmd_send_acl(const std::vector<std::string>& args);
  CommandResult cmd_write_ram(const std::vector<std::string>& args);
  CommandResult cmd_read_ram(const std::vector<std::string>& args);
  CommandResult cmd_launch_ram(const std::vector<std::string>& args);
  CommandResult cmd_log(const std::vector<std::string>& args);
  CommandResult cmd_probe(const std::vector<std::string>& args);
  void print_help();

  /// Prints capture records appended since `mark` that carry feedback
  /// (events, errors, received data, notes) as render_text lines.
  void print_feedback_since(std::size_t mark);

  /// Sends a vendor command and returns the Command Complete return
  /// parameters (after the status byte), or nullopt on failure.
  std::optional<std::vector<uint8_t>> vendor_exchange(
      uint16_t ocf, std::span<const uint8_t> params);

  bool export_capture();

  ShellConfig config_;
  std::ostream& out_;
  std::ostream& err_;
  std::shared_ptr<transport::TransportSession> transport_;
  std::shared_ptr<pklog::CaptureLog> capture_;
  std::unique_ptr<dispatch::RawDispatchSession> session_;
  uint32_t next_request_ = 1;
};

}  // namespace btraw::shell
