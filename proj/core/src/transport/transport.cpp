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

#include "btraw/transport/transport.hpp"

#include "btraw/transport/replay.hpp"
#include "btraw/transport/sim_transport.hpp"
#include "btraw/transport/stream.hpp"

namespace btraw::transport {

std::unique_ptr<TransportSession> open_transport(
    const TransportConfig& config) {
  switch (config.kind) {
    case TransportKind::kInProcessSim:
      return std::make_unique<SimTransport>(config.profile);
    case TransportKind::kFramedStream:
      if (config.address.empty()) {
        throw BadConfigError("framed-stream backend needs a host:port address");
      }
      return std::make_unique<StreamTransport>(config.address);
    case TransportKind::kReplay:
      if (config.capture_path.empty()) {
        throw BadConfigError("replay backend needs a capture file path");
      }
      return std::make_unique<ReplayTransport>(config.capture_path,
                                               config.replay_recorded_pacing);
  }
  throw BadConfigError("unknown transport kind");
}

}  // namespace btraw::transport
