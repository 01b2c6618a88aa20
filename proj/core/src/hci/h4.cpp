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

#include "btraw/hci/h4.hpp"

#include <stdexcept>

namespace btraw::hci {
namespace {

void append_le16(std::vector<uint8_t>& out, uint16_t value) {
  out.push_back(static_cast<uint8_t>(value & 0xFF));
  out.push_back(static_cast<uint8_t>(value >> 8));
}

uint16_t read_le16(std::span<const uint8_t> bytes, std::size_t offset) {
  return static_cast<uint16_t>(bytes[offset] |
                               (static_cast<uint16_t>(bytes[offset + 1]) << 8));
}

DecodeResult done(HciPacket packet, std::size_t consumed) {
  DecodeResult result;
  result.status = DecodeStatus::kOk;
  result.packet = std::move(packet);
  result.consumed = consumed;
  return result;
}

DecodeResult need_more() { return DecodeResult{}; }

}  // namespace

bool is_valid(const CommandPacket& packet) {
  return packet.params.size() <= kMaxCommandParams;
}

bool is_valid(const EventPacket& packet) {
  return packet.params.size() <= kMaxEventParams;
}

bool is_valid(const AclDataPacket& packet) {
  return packet.handle.in_valid_range() && packet.pb_flag <= kMaxTwoBitFlag &&
         packet.bc_flag <= kMaxTwoBitFlag &&
         packet.payload.size() <= kMaxAclPayload;
}

bool is_valid(const ScoDataPacket& packet) {
  return packet.handle.in_valid_range() &&
         packet.status_flag <= kMaxTwoBitFlag &&
         packet.payload.size() <= kMaxScoPayload;
}

bool is_valid(const HciPacket& packet) {
  return std::visit([](const auto& p) { return is_valid(p); }, packet);
}

std::vector<uint8_t> encode_h4(const HciPacket& packet) {
  if (!is_valid(packet)) {
    throw std::invalid_argument("packet violates HCI type invariants");
  }

  std::vector<uint8_t> out;
  if (const auto* cmd = std::get_if<CommandPacket>(&packet)) {
    out.reserve(4 + cmd->params.size());
    out.push_back(kIndicatorCommand);
    append_le16(out, cmd->opcode.packed());
    out.push_back(static_cast<uint8_t>(cmd->params.size()));
    out.insert(out.end(), cmd->params.begin(), cmd->params.end());
  } else if (const auto* event = std::get_if<EventPacket>(&packet)) {
    out.reserve(3 + event->params.size());
    out.push_back(kIndicatorEvent);
    out.push_back(event->code);
    out.push_back(static_cast<uint8_t>(event->params.size()));
    out.insert(out.end(), event->params.begin(), event->params.end());
  } else if (const auto* acl = std::get_if<AclDataPacket>(&packet)) {
    out.reserve(5 + acl->payload.size());
    out.push_back(kIndicatorAclData);
    const uint16_t header =
        static_cast<uint16_t>(acl->handle.value() | (acl->pb_flag << 12) |
                              (acl->bc_flag << 14));
    append_le16(out, header);
    append_le16(out, static_cast<uint16_t>(acl->payload.size()));
    out.insert(out.end(), acl->payload.begin(), acl->payload.end());
  } else {
    const auto& sco = std::get<ScoDataPacket>(packet);
    out.reserve(4 + sco.payload.size());
    out.push_back(kIndicatorScoData);
    const uint16_t header =
        static_cast<uint16_t>(sco.handle.value() | (sco.status_flag << 12));
    append_le16(out, header);
    out.push_back(static_cast<uint8_t>(sco.payload.size()));
    out.insert(out.end(), sco.payload.begin(), sco.payload.end());
  }
  return out;
}

DecodeResult decode_h4(std::span<const uint8_t> stream) {
  if (stream.empty()) {
    return need_more();
  }

  const uint8_t indicator = stream[0];
  switch (indicator) {
    case kIndicatorCommand: {
      if (stream.size() < 4) {
        return need_more();
      }
      const uint16_t packed = read_le16(stream, 1);
      const std::size_t len = stream[3];
      if (stream.size() < 4 + len) {
        return need_more();
      }
      CommandPacket cmd;
      cmd.opcode = Opcode::from_packed(packed);
      cmd.params.assign(stream.begin() + 4, stream.begin() + 4 + len);
      return done(std::move(cmd), 4 + len);
    }
    case kIndicatorAclData: {
      if (stream.size() < 5) {
        return need_more();
      }
      const uint16_t header = read_le16(stream, 1);
      const std::size_t len = read_le16(stream, 3);
      if (stream.size() < 5 + len) {
        return need_more();
      }
      AclDataPacket acl;
      acl.handle = ConnectionHandle(header & ConnectionHandle::kFieldMax);
      acl.pb_flag = static_cast<uint8_t>((header >> 12) & kMaxTwoBitFlag);
      acl.bc_flag = static_cast<uint8_t>((header >> 14) & kMaxTwoBitFlag);
      acl.payload.assign(stream.begin() + 5, stream.begin() + 5 + len);
      return done(std::move(acl), 5 + len);
    }
    case kIndicatorScoData: {
      if (stream.size() < 4) {
        return need_more();
      }
      const uint16_t header = read_le16(stream, 1);
      const std::size_t len = stream[3];
      if (stream.size() < 4 + len) {
        return need_more();
      }
      ScoDataPacket sco;
      sco.handle = ConnectionHandle(header & ConnectionHandle::kFieldMax);
      sco.status_flag = static_cast<uint8_t>((header >> 12) & kMaxTwoBitFlag);
      sco.payload.assign(stream.begin() + 4, stream.begin() + 4 + len);
      return done(std::move(sco), 4 + len);
    }
    case kIndicatorEvent: {
      if (stream.size() < 3) {
        return need_more();
      }
      const std::size_t len = stream[2];
      if (stream.size() < 3 + len) {
        return need_more();
      }
      EventPacket event;
      event.code = stream[1];
      event.params.assign(stream.begin() + 3, stream.begin() + 3 + len);
      return done(std::move(event), 3 + len);
    }
    default: {
      DecodeResult result;
      result.status = DecodeStatus::kUnknownIndicator;
      result.indicator = indicator;
      return result;
    }
  }
}

std::vector<uint8_t> raw_command_buffer(Opcode opcode,
                                        std::span<const uint8_t> params) {
  if (params.size() > kMaxCommandParams) {
    throw std::length_error("HCI command parameters exceed 255 bytes");
  }
  std::vector<uint8_t> out;
  out.reserve(3 + params.size());
  append_le16(out, opcode.packed());
  out.push_back(static_cast<uint8_t>(params.size()));
  out.insert(out.end(), params.begin(), params.end());
  return out;
}

void H4StreamDecoder::feed(std::span<const uint8_t> bytes) {
  // Compact leading consumed bytes before they accumulate.
  if (read_pos_ > 4096 && read_pos_ == buffer_.size()) {
    buffer_.clear();
    read_pos_ = 0;
  } else if (read_pos_ > 4096) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + read_pos_);
    read_pos_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

DecodeResult H4StreamDecoder::next() {
  auto result = decode_h4(
      std::span<const uint8_t>(buffer_).subspan(read_pos_));
  if (result.ok()) {
    read_pos_ += result.consumed;
  }
  return result;
}

}  // namespace btraw::hci
