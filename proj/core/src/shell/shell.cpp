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

#include "btraw/shell/shell.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "btraw/hci/constants.hpp"
#include "btraw/hci/h4.hpp"
#include "btraw/pklog/render.hpp"
#include "btraw/probe/probe.hpp"
#include "btraw/util/hex.hpp"

namespace btraw::shell {
namespace {

constexpr const char* kProbeDemoPeer = "CA:FE:00:00:00:01";

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) {
    tokens.push_back(token);
  }
  return tokens;
}

std::string join_from(const std::vector<std::string>& tokens,
                      std::size_t first) {
  std::string out;
  for (std::size_t i = first; i < tokens.size(); ++i) {
    if (!out.empty()) {
      out += ' ';
    }
    out += tokens[i];
  }
  return out;
}

std::string trim(const std::string& line) {
  const auto begin = line.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = line.find_last_not_of(" \t\r\n");
  return line.substr(begin, end - begin + 1);
}

void append_le32(std::vector<uint8_t>& out, uint32_t value) {
  out.push_back(static_cast<uint8_t>(value));
  out.push_back(static_cast<uint8_t>(value >> 8));
  out.push_back(static_cast<uint8_t>(value >> 16));
  out.push_back(static_cast<uint8_t>(value >> 24));
}

uint16_t read_le16(const std::vector<uint8_t>& bytes, std::size_t offset) {
  return static_cast<uint16_t>(bytes[offset] |
                               (static_cast<uint16_t>(bytes[offset + 1]) << 8));
}

}  // namespace

Shell::Shell(ShellConfig config, std::ostream& out, std::ostream& err)
    : config_(std::move(config)),
      out_(out),
      err_(err),
      transport_(transport::open_transport(config_.transport)),
      capture_(std::make_shared<pklog::CaptureLog>()),
      session_(std::make_unique<dispatch::RawDispatchSession>(transport_,
                                                              capture_)) {}

void Shell::print_feedback_since(std::size_t mark) {
  for (const auto& record : capture_->snapshot_from(mark)) {
    switch (record.kind) {
      case pklog::RecordKind::kEvent:
      case pklog::RecordKind::kError:
      case pklog::RecordKind::kAclReceived:
      case pklog::RecordKind::kNote:
        out_ << pklog::render_text(record) << '\n';
        break;
      default:
        break;  // echoes of our own sends stay in the log only
    }
  }
  session_->drain_events();
}

Shell::CommandResult Shell::execute_line(const std::string& line) {
  const std::string trimmed = trim(line);
  if (trimmed.empty() || trimmed[0] == '#') {
    return CommandResult::kOk;
  }
  const auto tokens = tokenize(trimmed);
  const std::string& verb = tokens[0];

  if (verb == "quit" || verb == "exit") {
    return CommandResult::kQuit;
  }
  if (verb == "help") {
    print_help();
    return CommandResult::kOk;
  }
  if (verb == "connect") {
    return cmd_connect(tokens);
  }
  if (verb == "sendhcicmd") {
    return cmd_send_hci(tokens);
  }
  if (verb == "sendaclcmd") {
    return cmd_send_acl(tokens);
  }
  if (verb == "writeram") {
    return cmd_write_ram(tokens);
  }
  if (verb == "readram") {
    return cmd_read_ram(tokens);
  }
  if (verb == "launchram") {
    return cmd_launch_ram(tokens);
  }
  if (verb == "log") {
    return cmd_log(tokens);
  }
  if (verb == "probe") {
    return cmd_probe(tokens);
  }
  err_ << "unknown command '" << verb << "'; type 'help' for usage\n";
  return CommandResult::kParseError;
}

Shell::CommandResult Shell::cmd_connect(const std::vector<std::string>& args) {
  if (args.size() != 2) {
    err_ << "usage: connect <bdaddr>  (AA:BB:CC:DD:EE:FF)\n";
    return CommandResult::kParseError;
  }
  const auto addr = util::parse_bd_addr(args[1]);
  if (!addr.has_value()) {
    err_ << "usage: connect <bdaddr>  (AA:BB:CC:DD:EE:FF)\n";
    return CommandResult::kParseError;
  }

  std::vector<uint8_t> params(addr->begin(), addr->end());
  params.push_back(0x18);  // Packet_Type 0xCC18
  params.push_back(0xCC);
  params.push_back(0x01);  // Page_Scan_Repetition_Mode R1
  params.push_back(0x00);  // Reserved
  params.push_back(0x00);  // Clock_Offset
  params.push_back(0x00);
  params.push_back(0x01);  // Allow_Role_Switch

  const std::size_t mark = capture_->size();
  const auto status = session_->send_raw_command(
      next_request_++,
      hci::raw_command_buffer(hci::kOpcodeCreateConnection, params));
  session_->wait_quiescent(config_.event_window);
  print_feedback_since(mark);
  if (!status.ok()) {
    err_ << "connect failed with status " << status.code << '\n';
    return CommandResult::kFailed;
  }

  for (const auto& record : capture_->snapshot_from(mark)) {
    if (record.kind == pklog::RecordKind::kEvent && !record.payload.empty() &&
        record.payload[0] == hci::kEventConnectionComplete &&
        record.payload.size() >= 5) {
      const uint8_t event_status = record.payload[2];
      if (event_status != hci::kStatusSuccess) {
        err_ << "connection rejected, status " << int{event_status} << '\n';
        return CommandResult::kFailed;
      }
      char buf[32];
      std::snprintf(buf, sizeof(buf), "Connection handle: 0x%04X",
                    read_le16(record.payload, 3));
      out_ << buf << '\n';
      return CommandResult::kOk;
    }
  }
  err_ << "no Connection Complete event arrived\n";
  return CommandResult::kFailed;
}

Shell::CommandResult Shell::cmd_send_hci(const std::vector<std::string>& args) {
  if (args.size() < 3) {
    err_ << "usage: sendhcicmd <ogf> <ocf> [hexparams]\n";
    return CommandResult::kParseError;
  }
  const auto ogf = util::parse_hex_value(args[1]);
  const auto ocf = util::parse_hex_value(args[2]);
  if (!ogf.has_value() || *ogf > hci::Opcode::kMaxOgf || !ocf.has_value() ||
      *ocf > hci::Opcode::kMaxOcf) {
    err_ << "usage: sendhcicmd <ogf> <ocf> [hexparams]  (ogf <= 0x3F, ocf <= "
            "0x3FF)\n";
    return CommandResult::kParseError;
  }
  const auto params = util::parse_hex_bytes(join_from(args, 3));
  if (!params.has_value() || params->size() > hci::kMaxCommandParams) {
    err_ << "malformed hex parameters (max 255 bytes)\n";
    return CommandResult::kParseError;
  }

  const hci::Opcode opcode(static_cast<uint8_t>(*ogf),
                           static_cast<uint16_t>(*ocf));
  const std::size_t mark = capture_->size();
  const auto status = session_->send_raw_command(
      next_request_++, hci::raw_command_buffer(opcode, *params));
  out_ << "status " << status.code << '\n';
  session_->wait_quiescent(config_.event_window);
  print_feedback_since(mark);
  return status.ok() ? CommandResult::kOk : CommandResult::kFailed;
}

Shell::CommandResult Shell::cmd_send_acl(const std::vector<std::string>& args) {
  if (args.size() < 3) {
    err_ << "usage: sendaclcmd <handle> <hexpayload>\n";
    return CommandResult::kParseError;
  }
  const auto handle = util::parse_hex_value(args[1]);
  const auto payload = util::parse_hex_bytes(join_from(args, 2));
  if (!handle.has_value() || *handle > 0xFFFFFFFF || !payload.has_value() ||
      payload->empty()) {
    err_ << "usage: sendaclcmd <handle> <hexpayload>\n";
    return CommandResult::kParseError;
  }

  const std::size_t mark = capture_->size();
  const auto status = session_->send_raw_acl(
      *payload, static_cast<uint32_t>(*handle), next_request_++);
  out_ << "status " << status.code << '\n';
  session_->wait_quiescent(config_.event_window);
  print_feedback_since(mark);
  return status.ok() ? CommandResult::kOk : CommandResult::kFailed;
}

std::optional<std::vector<uint8_t>> Shell::vendor_exchange(
    uint16_t ocf, std::span<const uint8_t> params) {
  const hci::Opcode opcode(config_.transport.profile.vendor.ogf, ocf);
  const std::size_t mark = capture_->size();
  const auto status = session_->send_raw_command(
      next_request_++, hci::raw_command_buffer(opcode, params));
  session_->wait_quiescent(config_.event_window);
  print_feedback_since(mark);
  if (!status.ok()) {
    err_ << "dispatch failed with status " << status.code << '\n';
    return std::nullopt;
  }
  for (const auto& record : capture_->snapshot_from(mark)) {
    if (record.kind == pklog::RecordKind::kEvent && record.payload.size() >= 6 &&
        record.payload[0] == hci::kEventCommandComplete &&
        read_le16(record.payload, 3) == opcode.packed()) {
      const uint8_t event_status = record.payload[5];
      if (event_status != hci::kStatusSuccess) {
        err_ << "command failed, status " << int{event_status} << '\n';
        return std::nullopt;
      }
      return std::vector<uint8_t>(record.payload.begin() + 6,
                                  record.payload.end());
    }
  }
  err_ << "no Command Complete event arrived\n";
  return std::nullopt;
}

Shell::CommandResult Shell::cmd_write_ram(const std::vector<std::string>& args) {
  if (args.size() < 3) {
    err_ << "usage: writeram <addr> <hexbytes>\n";
    return CommandResult::kParseError;
  }
  const auto addr = util::parse_hex_value(args[1]);
  const auto data = util::parse_hex_bytes(join_from(args, 2));
  if (!addr.has_value() || *addr > 0xFFFFFFFF || !data.has_value() ||
      data->empty() || data->size() > 251) {
    err_ << "usage: writeram <addr> <hexbytes>  (1..251 bytes)\n";
    return CommandResult::kParseError;
  }
  std::vector<uint8_t> params;
  append_le32(params, static_cast<uint32_t>(*addr));
  params.insert(params.end(), data->begin(), data->end());
  const auto ret =
      vendor_exchange(config_.transport.profile.vendor.write_ram_ocf, params);
  return ret.has_value() ? CommandResult::kOk : CommandResult::kFailed;
}

Shell::CommandResult Shell::cmd_read_ram(const std::vector<std::string>& args) {
  if (args.size() != 3) {
    err_ << "usage: readram <addr> <len>\n";
    return CommandResult::kParseError;
  }
  const auto addr = util::parse_hex_value(args[1]);
  const auto len = util::parse_hex_value(args[2]);
  if (!addr.has_value() || *addr > 0xFFFFFFFF || !len.has_value() ||
      *len == 0 || *len > 251) {
    err_ << "usage: readram <addr> <len>  (1..251 bytes, hex)\n";
    return CommandResult::kParseError;
  }
  std::vector<uint8_t> params;
  append_le32(params, static_cast<uint32_t>(*addr));
  params.push_back(static_cast<uint8_t>(*len));
  const auto ret =
      vendor_exchange(config_.transport.profile.vendor.read_ram_ocf, params);
  if (!ret.has_value()) {
    return CommandResult::kFailed;
  }
  out_ << util::format_hex_bytes(*ret) << '\n';
  return CommandResult::kOk;
}

Shell::CommandResult Shell::cmd_launch_ram(
    const std::vector<std::string>& args) {
  if (args.size() != 2) {
    err_ << "usage: launchram <addr>\n";
    return CommandResult::kParseError;
  }
  const auto addr = util::parse_hex_value(args[1]);
  if (!addr.has_value() || *addr > 0xFFFFFFFF) {
    err_ << "usage: launchram <addr>\n";
    return CommandResult::kParseError;
  }
  std::vector<uint8_t> params;
  append_le32(params, static_cast<uint32_t>(*addr));
  const auto ret =
      vendor_exchange(config_.transport.profile.vendor.launch_ram_ocf, params);
  return ret.has_value() ? CommandResult::kOk : CommandResult::kFailed;
}

Shell::CommandResult Shell::cmd_log(const std::vector<std::string>& args) {
  if (args.size() == 1) {
    for (const auto& record : capture_->snapshot()) {
      out_ << pklog::render_text(record) << '\n';
    }
    return CommandResult::kOk;
  }
  if (args.size() == 2 && args[1] == "tail") {
    const auto records = capture_->snapshot();
    const std::size_t first = records.size() > 10 ? records.size() - 10 : 0;
    for (std::size_t i = first; i < records.size(); ++i) {
      out_ << pklog::render_text(records[i]) << '\n';
    }
    return CommandResult::kOk;
  }
  if (args.size() == 3 && args[1] == "export") {
    try {
      const auto records = capture_->snapshot();
      pklog::write_capture_file(args[2], records);
      out_ << "exported " << records.size() << " records to " << args[2]
           << '\n';
    } catch (const std::exception& error) {
      err_ << "export failed: " << error.what() << '\n';
      return CommandResult::kFailed;
    }
    return CommandResult::kOk;
  }
  err_ << "usage: log [tail|export <file>]\n";
  return CommandResult::kParseError;
}

Shell::CommandResult Shell::cmd_probe(const std::vector<std::string>& args) {
  if (args.size() != 2 || args[1] != "demo") {
    err_ << "usage: probe demo\n";
    return CommandResult::kParseError;
  }

  if (session_->live_handles().empty()) {
    out_ << "no live connection, connecting to " << kProbeDemoPeer << '\n';
    const auto connected = cmd_connect({"connect", kProbeDemoPeer});
    if (connected != CommandResult::kOk) {
      return connected;
    }
  }
  const uint16_t live = session_->live_handles().front();

  const probe::Role roles[] = {probe::Role::kData, probe::Role::kHandle,
                               probe::Role::kRequest};

  // The hidden ordering is derived from the controller seed so demo runs
  // are reproducible.
  probe::Permutation hidden = {0, 1, 2};
  std::mt19937_64 rng(config_.transport.profile.seed ^ 0x70726f6265ULL);
  std::shuffle(hidden.begin(), hidden.end(), rng);

  const auto sentinels = probe::default_sentinels(live);
  const auto callable = probe::make_hidden_send(*session_, roles, hidden, live,
                                                sentinels.data_tag);

  probe::ProbeOptions options;
  options.settle_window = config_.event_window;
  const auto verdict =
      probe::infer_arg_order(callable, roles, *session_, sentinels, options);
  session_->drain_events();

  out_ << render_evidence_table(roles, verdict);
  if (!verdict.decided) {
    err_ << "probe demo failed to determine the argument order\n";
    return CommandResult::kFailed;
  }
  out_ << "hidden placement was: ";
  for (std::size_t p = 0; p < hidden.size(); ++p) {
    out_ << (p ? ", " : "") << probe::role_name(roles[hidden[p]]);
  }
  out_ << '\n';
  return CommandResult::kOk;
}

void Shell::print_help() {
  out_ << "commands:\n"
          "  connect <bdaddr>               create a connection, print the "
          "handle\n"
          "  sendhcicmd <ogf> <ocf> [hex]   raw HCI command (hex args, 0x "
          "optional)\n"
          "  sendaclcmd <handle> <hex>      raw ACL data on a handle\n"
          "  writeram <addr> <hex>          vendor RAM write\n"
          "  readram <addr> <len>           vendor RAM read\n"
          "  launchram <addr>               vendor RAM launch\n"
          "  log [tail|export <file>]       show or export the capture\n"
          "  probe demo                     infer a hidden argument order "
          "from log feedback\n"
          "  help | quit\n";
}

bool Shell::export_capture() {
  if (config_.capture_export_path.empty()) {
    return true;
  }
  try {
    pklog::write_capture_file(config_.capture_export_path,
                              capture_->snapshot());
  } catch (const std::exception& error) {
    err_ << "capture export failed: " << error.what() << '\n';
    return false;
  }
  return true;
}

int Shell::run_repl(std::istream& in) {
  out_ << "btraw shell; 'help' lists commands, 'quit' leaves.\n";
  std::string line;
  while (true) {
    out_ << "btraw> " << std::flush;
    if (!std::getline(in, line)) {
      out_ << '\n';
      break;
    }
    if (execute_line(line) == CommandResult::kQuit) {
      break;
    }
  }
  return export_capture() ? 0 : 2;
}

int Shell::run_script(std::istream& script) {
  std::string line;
  int line_no = 0;
  while (std::getline(script, line)) {
    ++line_no;
    const CommandResult result = execute_line(line);
    if (result == CommandResult::kQuit) {
      break;
    }
    if (result != CommandResult::kOk) {
      err_ << "line " << line_no << ": command failed: " << trim(line) << '\n';
      export_capture();
      return 1;
    }
  }
  return export_capture() ? 0 : 2;
}

}  // namespace btraw::shell
