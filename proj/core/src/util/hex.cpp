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

#include "btraw/util/hex.hpp"

#include <cctype>
#include <cstdio>

namespace btraw::util {
namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::optional<std::vector<uint8_t>> parse_hex_bytes(std::string_view text) {
  std::vector<uint8_t> out;
  int pending = -1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (pending >= 0) return std::nullopt;  // split mid-byte
      continue;
    }
    if (c == '0' && pending < 0 && i + 1 < text.size() &&
        (text[i + 1] == 'x' || text[i + 1] == 'X')) {
      ++i;
      continue;
    }
    const int value = nibble(c);
    if (value < 0) return std::nullopt;
    if (pending < 0) {
      pending = value;
    } else {
      out.push_back(static_cast<uint8_t>((pending << 4) | value));
      pending = -1;
    }
  }
  if (pending >= 0) return std::nullopt;  // odd digit count
  return out;
}

std::optional<uint64_t> parse_hex_value(std::string_view text) {
  if (text.size() >= 2 && text[0] == '0' &&
      (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
  }
  if (text.empty()) return std::nullopt;
  uint64_t value = 0;
  for (char c : text) {
    const int digit = nibble(c);
    if (digit < 0) return std::nullopt;
    if (value > (UINT64_MAX >> 4)) return std::nullopt;
    value = (value << 4) | static_cast<uint64_t>(digit);
  }
  return value;
}

std::string format_hex_bytes(std::span<const uint8_t> bytes) {
  std::string out;
  out.reserve(bytes.size() * 3);
  char buf[4];
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), i == 0 ? "%02X" : " %02X", bytes[i]);
    out += buf;
  }
  return out;
}

std::optional<std::array<uint8_t, 6>> parse_bd_addr(std::string_view text) {
  std::array<uint8_t, 6> display{};  // most significant byte first
  std::size_t pos = 0;
  for (int i = 0; i < 6; ++i) {
    if (pos + 2 > text.size()) return std::nullopt;
    const int hi = nibble(text[pos]);
    const int lo = nibble(text[pos + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    display[i] = static_cast<uint8_t>((hi << 4) | lo);
    pos += 2;
    if (i < 5) {
      if (pos >= text.size() || (text[pos] != ':' && text[pos] != '-')) {
        return std::nullopt;
      }
      ++pos;
    }
  }
  if (pos != text.size()) return std::nullopt;
  std::array<uint8_t, 6> wire{};
  for (int i = 0; i < 6; ++i) {
    wire[i] = display[5 - i];
  }
  return wire;
}

std::string format_bd_addr(std::span<const uint8_t, 6> wire_bytes) {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02X:%02X:%02X:%02X:%02X:%02X",
                wire_bytes[5], wire_bytes[4], wire_bytes[3], wire_bytes[2],
                wire_bytes[1], wire_bytes[0]);
  return buf;
}

}  // namespace btraw::util
