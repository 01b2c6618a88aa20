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

#include "btraw/probe/probe.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "btraw/util/hex.hpp"

namespace btraw::probe {
namespace {

constexpr const char* kNoDeviceHandleMarker = "ACLPacketToHw No Device Handle";
constexpr const char* kNocpPrefix = "Number of Completed Packets";

// What a scalar degrades to when it lands in a buffer-typed slot, and vice
// versa, in the simulated mis-typed call.
constexpr uint32_t kInvalidScalar = 0xFFFFFFFF;

uint32_t as_scalar(const ProbeValue& value) {
  if (const auto* scalar = std::get_if<uint32_t>(&value)) {
    return *scalar;
  }
  return kInvalidScalar;
}

std::vector<uint8_t> as_buffer(const ProbeValue& value) {
  if (const auto* buffer = std::get_if<std::vector<uint8_t>>(&value)) {
    return *buffer;
  }
  return {};  // a scalar is not a readable buffer
}

std::string placement_text(std::span<const Role> roles,
                           const Permutation& perm) {
  std::string out = "(";
  for (std::size_t p = 0; p < perm.size(); ++p) {
    if (p > 0) {
      out += ", ";
    }
    out += role_name(roles[perm[p]]);
  }
  out += ")";
  return out;
}

std::optional<uint32_t> named_handle_in_error(std::string_view message) {
  const std::size_t pos = message.rfind("0x");
  if (pos == std::string_view::npos) {
    return std::nullopt;
  }
  const auto value = util::parse_hex_value(message.substr(pos));
  if (!value.has_value() || *value > 0xFFFFFFFF) {
    return std::nullopt;
  }
  return static_cast<uint32_t>(*value);
}

void append_note(pklog::CaptureLog& capture, std::string message) {
  pklog::LogRecord note;
  note.timestamp = capture.now();
  note.kind = pklog::RecordKind::kNote;
  note.message = std::move(message);
  capture.append(std::move(note));
}

std::optional<std::size_t> role_index(std::span<const Role> roles,
                                      Role wanted) {
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (roles[i] == wanted) {
      return i;
    }
  }
  return std::nullopt;
}

}  // namespace

const char* role_name(Role role) {
  switch (role) {
    case Role::kData:
      return "data";
    case Role::kSize:
      return "size";
    case Role::kHandle:
      return "handle";
    case Role::kRequest:
      return "request";
  }
  return "?";
}

const char* feedback_name(Feedback feedback) {
  switch (feedback) {
    case Feedback::kSuccess:
      return "Success";
    case Feedback::kNoDeviceHandle:
      return "NoDeviceHandle";
    case Feedback::kMalformed:
      return "Malformed";
    case Feedback::kSilent:
      return "Silent";
  }
  return "?";
}

Feedback classify_feedback(std::span<const pklog::LogRecord> window) {
  bool any_error = false;
  for (const auto& record : window) {
    if (record.kind != pklog::RecordKind::kError) {
      continue;
    }
    any_error = true;
    if (record.message.find(kNoDeviceHandleMarker) != std::string::npos) {
      return Feedback::kNoDeviceHandle;
    }
  }

  for (std::size_t i = 0; i < window.size(); ++i) {
    if (window[i].kind != pklog::RecordKind::kAclSent) {
      continue;
    }
    for (std::size_t j = i + 1; j < window.size(); ++j) {
      if (window[j].kind == pklog::RecordKind::kEvent &&
          window[j].handle == window[i].handle &&
          window[j].message.rfind(kNocpPrefix, 0) == 0) {
        return Feedback::kSuccess;
      }
    }
  }
  return any_error ? Feedback::kMalformed : Feedback::kSilent;
}

BlackBoxCallable make_hidden_send(dispatch::RawDispatchSession& session,
                                  std::span<const Role> roles,
                                  Permutation hidden, uint16_t live_handle,
                                  std::vector<uint8_t> fixed_payload) {
  if (hidden.size() != roles.size()) {
    throw std::invalid_argument("hidden permutation does not cover the roles");
  }
  std::vector<Role> role_list(roles.begin(), roles.end());

  BlackBoxCallable callable;
  callable.arity = role_list.size();
  callable.invoke = [&session, role_list, hidden = std::move(hidden),
                     live_handle, fixed_payload = std::move(fixed_payload)](
                        std::span<const ProbeValue> values) {
    std::vector<uint8_t> data = fixed_payload;
    std::optional<uint32_t> size;
    uint32_t handle = live_handle;
    uint32_t request = 0;

    for (std::size_t p = 0; p < values.size(); ++p) {
      switch (role_list[hidden[p]]) {
        case Role::kData:
          data = as_buffer(values[p]);
          break;
        case Role::kSize:
          size = as_scalar(values[p]);
          break;
        case Role::kHandle:
          handle = as_scalar(values[p]);
          break;
        case Role::kRequest:
          request = as_scalar(values[p]);
          break;
      }
    }

    // A size that disagrees with the buffer voids the read, like a bad
    // length handed to a C API.
    if (size.has_value() && *size != data.size()) {
      data.clear();
    }
    session.send_raw_acl(data, handle, request);
  };
  return callable;
}

Sentinels default_sentinels(uint16_t live_handle) {
  Sentinels sentinels;
  sentinels.live_handle = live_handle;
  sentinels.request_value = 0x0172;
  const char tag[] = "RAWPROBE-DATA-01";  // 16 bytes, mirrors the traces
  sentinels.data_tag.assign(tag, tag + 16);
  return sentinels;
}

ProbeVerdict infer_arg_order(const BlackBoxCallable& callable,
                             std::span<const Role> roles,
                             dispatch::RawDispatchSession& session,
                             const Sentinels& sentinels,
                             const ProbeOptions& options) {
  const std::size_t n = roles.size();
  if (callable.arity != n) {
    throw std::invalid_argument("callable arity does not match role count");
  }
  if (sentinels.data_tag.empty()) {
    throw std::invalid_argument("data sentinel must be non-empty");
  }
  if (sentinels.live_handle == sentinels.request_value ||
      sentinels.live_handle == sentinels.data_tag.size() ||
      sentinels.request_value == sentinels.data_tag.size()) {
    throw std::invalid_argument("sentinel values must be pairwise distinct");
  }

  const auto sentinel_for = [&](Role role) -> ProbeValue {
    switch (role) {
      case Role::kData:
        return sentinels.data_tag;
      case Role::kSize:
        return static_cast<uint32_t>(sentinels.data_tag.size());
      case Role::kHandle:
        return static_cast<uint32_t>(sentinels.live_handle);
      case Role::kRequest:
        return sentinels.request_value;
    }
    return uint32_t{0};
  };

  const auto sentinel_role_of = [&](uint32_t value) -> std::optional<Role> {
    if (value == sentinels.live_handle) return Role::kHandle;
    if (value == sentinels.request_value) return Role::kRequest;
    if (value == sentinels.data_tag.size()) return Role::kSize;
    return std::nullopt;
  };

  pklog::CaptureLog& capture = *session.capture();
  const auto handle_index = role_index(roles, Role::kHandle);

  ProbeVerdict verdict;
  std::map<std::size_t, std::size_t> constraints;  // position -> role index

  Permutation perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    if (options.adaptive_pruning) {
      bool skip = false;
      for (const auto& [position, required] : constraints) {
        if (perm[position] != required) {
          skip = true;
          break;
        }
      }
      if (skip) {
        continue;
      }
    }

    verdict.probes_used += 1;
    std::vector<ProbeValue> values;
    values.reserve(n);
    for (std::size_t p = 0; p < n; ++p) {
      values.push_back(sentinel_for(roles[perm[p]]));
    }

    const std::size_t mark = capture.size();
    callable.invoke(values);
    session.wait_quiescent(options.settle_window);
    const auto window = capture.snapshot_from(mark);
    const Feedback feedback = classify_feedback(window);
    verdict.evidence.push_back({perm, feedback});

    char note[160];
    std::snprintf(note, sizeof(note), "probe %zu: %s -> %s",
                  verdict.probes_used,
                  placement_text(roles, perm).c_str(),
                  feedback_name(feedback));
    append_note(capture, note);

    if (feedback == Feedback::kSuccess) {
      verdict.decided = true;
      verdict.permutation = perm;
      break;
    }

    if (options.adaptive_pruning && feedback == Feedback::kNoDeviceHandle &&
        handle_index.has_value()) {
      // The error names the sentinel that sat in the handle slot; pin
      // that caller position to the handle role for future candidates.
      for (const auto& record : window) {
        if (record.kind != pklog::RecordKind::kError ||
            record.message.find(kNoDeviceHandleMarker) == std::string::npos) {
          continue;
        }
        const auto named = named_handle_in_error(record.message);
        if (!named.has_value()) {
          continue;
        }
        const auto misplaced = sentinel_role_of(*named);
        if (!misplaced.has_value()) {
          continue;
        }
        const auto misplaced_index = role_index(roles, *misplaced);
        if (!misplaced_index.has_value()) {
          continue;
        }
        for (std::size_t p = 0; p < n; ++p) {
          if (perm[p] == *misplaced_index) {
            constraints[p] = *handle_index;
            break;
          }
        }
        break;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (verdict.decided) {
    append_note(capture,
                "probe verdict: " + placement_text(roles, verdict.permutation) +
                    " after " + std::to_string(verdict.probes_used) +
                    " probe(s)");
  } else {
    append_note(capture, "probe verdict: undecidable after " +
                             std::to_string(verdict.probes_used) +
                             " probe(s)");
  }
  return verdict;
}

std::string render_evidence_table(std::span<const Role> roles,
                                  const ProbeVerdict& verdict) {
  std::string out = "probe  placement";
  std::size_t widest = 0;
  for (const auto& entry : verdict.evidence) {
    widest = std::max(widest, placement_text(roles, entry.tried).size());
  }
  widest = std::max(widest, std::string_view("placement").size());
  out.append(widest - 9, ' ');
  out += "  feedback\n";

  for (std::size_t i = 0; i < verdict.evidence.size(); ++i) {
    const auto& entry = verdict.evidence[i];
    const std::string placement = placement_text(roles, entry.tried);
    char row[32];
    std::snprintf(row, sizeof(row), "%5zu  ", i + 1);
    out += row;
    out += placement;
    out.append(widest - placement.size() + 2, ' ');
    out += feedback_name(entry.observed);
    out += '\n';
  }

  if (verdict.decided) {
    out += "verdict: " + placement_text(roles, verdict.permutation) +
           " (probes used: " + std::to_string(verdict.probes_used) + ")\n";
  } else {
    out += "verdict: undecidable (probes used: " +
           std::to_string(verdict.probes_used) + ")\n";
  }
  return out;
}

}  // namespace btraw::probe
