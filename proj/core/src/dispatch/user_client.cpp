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

#include "btraw/dispatch/user_client.hpp"

namespace btraw::dispatch {

void UserClient::register_routine(uint32_t selector, Routine routine) {
  routines_[selector] = std::move(routine);
}

bool UserClient::has_routine(uint32_t selector) const {
  return routines_.count(selector) != 0;
}

std::vector<uint8_t> UserClient::call(uint32_t selector,
                                      std::span<const uint8_t> payload) const {
  const auto it = routines_.find(selector);
  if (it == routines_.end()) {
    throw UnknownSelectorError(selector);
  }
  return it->second(payload);
}

}  // namespace btraw::dispatch
