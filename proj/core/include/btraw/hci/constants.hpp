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

#include "btraw/hci/opcode.hpp"

namespace btraw::hci {

// Commands understood by the simulated controller.
inline constexpr Opcode kOpcodeCreateConnection{0x01, 0x0005};  // § 7.1.5
inline constexpr Opcode kOpcodeDisconnect{0x01, 0x0006};        // § 7.1.6
inline constexpr Opcode kOpcodeReset{0x03, 0x0003};             // § 7.3.2
inline constexpr Opcode kOpcodeReadLocalName{0x03, 0x0014};     // § 7.3.12
inline constexpr Opcode kOpcodeReadBdAddr{0x04, 0x0009};        // § 7.4.6

// Event codes.
inline constexpr uint8_t kEventConnectionComplete = 0x03;
inline constexpr uint8_t kEventDisconnectionComplete = 0x05;
inline constexpr uint8_t kEventCommandComplete = 0x0E;
inline constexpr uint8_t kEventCommandStatus = 0x0F;
inline constexpr uint8_t kEventNumberOfCompletedPackets = 0x13;

// Status codes (Vol 1, Part F).
inline constexpr uint8_t kStatusSuccess = 0x00;
inline constexpr uint8_t kStatusUnknownCommand = 0x01;
inline constexpr uint8_t kStatusUnknownConnectionId = 0x02;
inline constexpr uint8_t kStatusConnectionLimitExceeded = 0x09;
inline constexpr uint8_t kStatusInvalidParameters = 0x12;

// Link types reported in Connection Complete.
inline constexpr uint8_t kLinkTypeAcl = 0x01;

inline constexpr std::size_t kBdAddrSize = 6;
inline constexpr std::size_t kLocalNameSize = 248;  // § 7.3.12 return field

}  // namespace btraw::hci
