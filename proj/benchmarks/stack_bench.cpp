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

#include <benchmark/benchmark.h>

#include "btraw/dispatch/session.hpp"
#include "btraw/hci/constants.hpp"
#include "btraw/transport/sim_transport.hpp"

namespace {

using namespace btraw;

struct Stack {
  std::shared_ptr<transport::SimTransport> transport;
  std::shared_ptr<pklog::CaptureLog> capture;
  std::unique_ptr<dispatch::RawDispatchSession> session;
  uint16_t handle = 0;
};

Stack connected_stack() {
  Stack stack;
  stack.transport =
      std::make_shared<transport::SimTransport>(sim::ControllerProfile{});
  stack.capture = std::make_shared<pklog::CaptureLog>();
  stack.session = std::make_unique<dispatch::RawDispatchSession>(
      stack.transport, stack.capture);
  const std::vector<uint8_t> params = {0x01, 0x00, 0x00, 0x00, 0xFE, 0xCA,
                                       0x18, 0xCC, 0x01, 0x00, 0x00, 0x00,
                                       0x01};
  stack.session->send_raw_command(
      1, hci::raw_command_buffer(hci::kOpcodeCreateConnection, params));
  stack.handle = stack.session->live_handles().front();
  return stack;
}

void BM_RawCommandRoundTrip(benchmark::State& state) {
  auto stack = connected_stack();
  const auto buffer = hci::raw_command_buffer(hci::kOpcodeReadBdAddr, {});
  uint32_t request = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        stack.session->send_raw_command(request++, buffer));
    stack.session->drain_events();
    if (stack.capture->size() > 1u << 16) {
      state.PauseTiming();
      stack.capture->clear();
      state.ResumeTiming();
    }
  }
}
BENCHMARK(BM_RawCommandRoundTrip);

void BM_RawAclSendWithCompletion(benchmark::State& state) {
  auto stack = connected_stack();
  const std::vector<uint8_t> payload(
      static_cast<std::size_t>(state.range(0)), 0x42);
  uint32_t request = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        stack.session->send_raw_acl(payload, stack.handle, request++));
    stack.session->drain_events();
    if (stack.capture->size() > 1u << 16) {
      state.PauseTiming();
      stack.capture->clear();
      state.ResumeTiming();
    }
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RawAclSendWithCompletion)->Arg(16)->Arg(1021);

}  // namespace
