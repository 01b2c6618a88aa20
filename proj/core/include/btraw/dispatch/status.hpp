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

namespace btraw::dispatch {

// Raw-send return codes: 0 success, negative argument/validation errors,
// positive transport/controller errors.
inline constexpr int kStatusOk = 0;
inline constexpr int kStatusMalformedBuffer = -1;
inline constexpr int kStatusHandleOutOfRange = -2;
inline constexpr int kStatusNoDeviceHandle = 1;
inline constexpr int kStatusTransportDown = 2;

/// Integer status returned by the raw-send entry points. The packet was
/// accepted for transmission iff code == 0.
struct DispatchStatus {
  int code = kStatusOk;

  bool ok() const { return code == kStatusOk; }
  bool argument_error() const { return code < 0; }
  bool transport_error() const { return code > 0; }

  bool operator==(const DispatchStatus&) const = default;
};

}  // namespace btraw::dispatch
