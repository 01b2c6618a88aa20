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

#include "btraw/transport/harness.hpp"

#include "btraw/dispatch/session.hpp"
#include "btraw/hci/h4.hpp"

namespace btraw::transport {

ScenarioStep ScenarioStep::command(hci::Opcode opcode,
                                   std::vector<uint8_t> params) {
  ScenarioStep step;
  step.kind = Kind::kRawCommand;
  step.opcode = opcode;
  step.bytes = std::move(params);
  return step;
}

ScenarioStep ScenarioStep::acl(uint16_t handle, std::vector<uint8_t> payload) {
  ScenarioStep step;
  step.kind = Kind::kRawAcl;
  step.handle = handle;
  step.bytes = std::move(payload);
  return step;
}

std::vector<BackendTranscript> transport_equivalence_harness(
    const Scenario& scenario, const std::vector<BackendSpec>& backends,
    std::chrono::milliseconds quiescence) {
  std::vector<BackendTranscript> transcripts;
  transcripts.reserve(backends.size());

  for (const BackendSpec& backend : backends) {
    std::shared_ptr<TransportSession> session_transport =
        open_transport(backend.config);
    auto capture = std::make_shared<pklog::CaptureLog>();
    dispatch::RawDispatchSession session(session_transport, capture);

    uint32_t request = 1;
    for (const ScenarioStep& step : scenario) {
      if (step.kind == ScenarioStep::Kind::kRawCommand) {
        const auto buffer = hci::raw_command_buffer(step.opcode, step.bytes);
        session.send_raw_command(request++, buffer);
      } else {
        session.send_raw_acl(step.bytes, step.handle, request++);
      }
      // Each step's responses must land before the next step so event
      // order is comparable across backends with different latencies.
      session.wait_quiescent(quiescence);
    }
    session.wait_quiescent(quiescence);

    BackendTranscript transcript;
    transcript.label = backend.label;
    transcript.inbound = session.drain_events();
    transcript.capture = capture->snapshot();
    transcripts.push_back(std::move(transcript));
  }
  return transcripts;
}

bool transcripts_equal(const BackendTranscript& a,
                       const BackendTranscript& b) {
  if (a.inbound.size() != b.inbound.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.inbound.size(); ++i) {
    if (hci::encode_h4(a.inbound[i]) != hci::encode_h4(b.inbound[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace btraw::transport
