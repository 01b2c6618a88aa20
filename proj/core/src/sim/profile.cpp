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

#include "btraw/sim/profile.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "btraw/util/hex.hpp"

namespace btraw::sim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ProfileError("profile line " + std::to_string(line) + ": " + what);
}

// Accepts decimal or 0x-prefixed hex.
uint64_t parse_number(std::string_view value, int line, uint64_t max) {
  uint64_t out = 0;
  bool ok = false;
  if (value.size() >= 2 && value[0] == '0' &&
      (value[1] == 'x' || value[1] == 'X')) {
    auto parsed = util::parse_hex_value(value);
    if (parsed.has_value()) {
      out = *parsed;
      ok = true;
    }
  } else {
    const auto* begin = value.data();
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out, 10);
    ok = (ec == std::errc() && ptr == end && !value.empty());
  }
  if (!ok) {
    fail(line, "malformed number '" + std::string(value) + "'");
  }
  if (out > max) {
    fail(line, "value '" + std::string(value) + "' out of range");
  }
  return out;
}

}  // namespace

ControllerProfile parse_profile(std::string_view text) {
  ControllerProfile profile;
  std::istringstream stream{std::string(text)};
  std::string raw_line;
  int line_no = 0;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    std::string_view line = trim(raw_line);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(line_no, "expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) {
      fail(line_no, "empty value for '" + std::string(key) + "'");
    }

    if (key == "bd_addr") {
      auto addr = util::parse_bd_addr(value);
      if (!addr.has_value()) {
        fail(line_no, "malformed bd_addr (want AA:BB:CC:DD:EE:FF)");
      }
      profile.bd_addr = *addr;
      profile.bd_addr_set = true;
    } else if (key == "local_name") {
      profile.local_name = std::string(value);
    } else if (key == "acl_total_credits") {
      profile.acl_total_credits =
          static_cast<uint16_t>(parse_number(value, line_no, 0xFFFF));
      if (profile.acl_total_credits == 0) {
        fail(line_no, "acl_total_credits must be positive");
      }
    } else if (key == "acl_buffer_size") {
      profile.acl_buffer_size =
          static_cast<uint16_t>(parse_number(value, line_no, 0xFFFF));
      if (profile.acl_buffer_size == 0) {
        fail(line_no, "acl_buffer_size must be positive");
      }
    } else if (key == "vendor_ogf") {
      profile.vendor.ogf =
          static_cast<uint8_t>(parse_number(value, line_no, 0x3F));
    } else if (key == "vendor_write_ram_ocf") {
      profile.vendor.write_ram_ocf =
          static_cast<uint16_t>(parse_number(value, line_no, 0x3FF));
    } else if (key == "vendor_read_ram_ocf") {
      profile.vendor.read_ram_ocf =
          static_cast<uint16_t>(parse_number(value, line_no, 0x3FF));
    } else if (key == "vendor_launch_ram_ocf") {
      profile.vendor.launch_ram_ocf =
          static_cast<uint16_t>(parse_number(value, line_no, 0x3FF));
    } else if (key == "patch_entry") {
      profile.patch_entry =
          static_cast<uint32_t>(parse_number(value, line_no, 0xFFFFFFFF));
    } else if (key == "seed") {
      profile.seed = parse_number(value, line_no, UINT64_MAX);
    } else if (key == "acl_completion_delay") {
      profile.acl_completion_delay =
          static_cast<uint32_t>(parse_number(value, line_no, 0xFFFFFFFF));
    } else {
      fail(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  return profile;
}

ControllerProfile load_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ProfileError("cannot open profile file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_profile(buffer.str());
}

}  // namespace btraw::sim
