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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace btraw::util {

/// Parses hex bytes given contiguously ("00112233") or space-separated
/// ("00 11 22 33"); an optional 0x prefix per token is accepted. Returns
/// nullopt on stray characters or an odd digit count.
std::optional<std::vector<uint8_t>> parse_hex_bytes(std::string_view text);

/// Parses an unsigned hex value, 0x prefix optional. Returns nullopt on
/// empty input, stray characters, or overflow past 64 bits.
std::optional<uint64_t> parse_hex_value(std::string_view text);

/// "DE AD BE EF" style rendering, uppercase, space-separated.
std::string format_hex_bytes(std::span<const uint8_t> bytes);

/// Parses "AA:BB:CC:DD:EE:FF" into wire order (least significant byte
/// first, as transmitted in HCI parameters).
std::optional<std::array<uint8_t, 6>> parse_bd_addr(std::string_view text);

/// Inverse of parse_bd_addr: wire-order bytes to "AA:BB:CC:DD:EE:FF".
std::string format_bd_addr(std::span<const uint8_t, 6> wire_bytes);

}  // namespace btraw::util
