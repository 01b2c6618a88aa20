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
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace btraw::dispatch {

// Routine indices of the kernel-boundary hop. One selector per packet
// class; the numbering is internal to this stack.
inline constexpr uint32_t kSelectorSendHci = 0x00;
inline constexpr uint32_t kSelectorSendAcl = 0x01;

class UnknownSelectorError : public std::out_of_range {
 public:
  explicit UnknownSelectorError(uint32_t selector)
      : std::out_of_range("no user-client routine registered for selector " +
                          std::to_string(selector)),
        selector_(selector) {}

  uint32_t selector() const { return selector_; }

 private:
  uint32_t selector_;
};

/// Selector-dispatched call table modeling the single message-port hop
/// between the raw-send functions and the driver. The response buffer is
/// returned synchronously; anything the controller says back arrives
/// asynchronously through the bound transport.
class UserClient {
 public:
  using Routine =
      std::function<std::vector<uint8_t>(std::span<const uint8_t>)>;

  void register_routine(uint32_t selector, Routine routine);
  bool has_routine(uint32_t selector) const;

  /// Throws UnknownSelectorError for unregistered selectors.
  std::vector<uint8_t> call(uint32_t selector,
                            std::span<const uint8_t> payload) const;

 private:
  std::map<uint32_t, Routine> routines_;
};

}  // namespace btraw::dispatch
