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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "btraw/hci/constants.hpp"
#include "btraw/pklog/render.hpp"
#include "btraw/transport/sim_transport.hpp"

namespace btraw::probe {
namespace {

struct Stack {
  std::shared_ptr<transport::SimTransport> transport;
  std::shared_ptr<pklog::CaptureLog> capture;
  std::unique_ptr<dispatch::RawDispatchSession> session;
  uint16_t live_handle = 0;
};

Stack make_connected_stack() {
  Stack stack;
  stack.transport = std::make_shared<transport::SimTransport>(
      sim::ControllerProfile{});
  stack.capture = std::make_shared<pklog::CaptureLog>();
  stack.session = std::make_unique<dispatch::RawDispatchSession>(
      stack.transport, stack.capture);
  const std::vector<uint8_t> params = {0x01, 0x00, 0x00, 0x00, 0xFE, 0xCA,
                                       0x18, 0xCC, 0x01, 0x00, 0x00, 0x00,
                                       0x01};
  stack.session->send_raw_command(
      1, hci::raw_command_buffer(hci::kOpcodeCreateConnection, params));
  const auto handles = stack.session->live_handles();
  EXPECT_EQ(handles.size(), 1u);
  stack.live_handle = handles.front();
  stack.session->drain_events();
  return stack;
}

std::vector<Permutation> all_permutations(std::size_t n) {
  Permutation perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<Permutation> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

pklog::LogRecord error_record(std::string message) {
  pklog::LogRecord record;
  record.kind = pklog::RecordKind::kError;
  record.message = std::move(message);
  return record;
}

pklog::LogRecord acl_sent_record(uint16_t handle) {
  pklog::LogRecord record;
  record.kind = pklog::RecordKind::kAclSent;
  record.handle = hci::ConnectionHandle(handle);
  record.message =
      pklog::format_acl_data_message(hci::ConnectionHandle(handle), 0x3, 16);
  return record;
}

pklog::LogRecord nocp_record(uint16_t handle) {
  hci::EventPacket nocp;
  nocp.code = hci::kEventNumberOfCompletedPackets;
  nocp.params = {0x01, static_cast<uint8_t>(handle & 0xFF),
                 static_cast<uint8_t>(handle >> 8), 0x01, 0x00};
  return pklog::make_event_record({0, 0}, nocp);
}

TEST(ClassifyFeedbackTest, SuccessfulTransmissionWindow) {
  const std::vector<pklog::LogRecord> window = {acl_sent_record(0x000B),
                                                nocp_record(0x000B)};
  EXPECT_EQ(classify_feedback(window), Feedback::kSuccess);
}

TEST(ClassifyFeedbackTest, WrongParameterWindow) {
  const std::vector<pklog::LogRecord> window = {
      error_record("ACLPacketToHw No Device Handle 0x172"),
      acl_sent_record(0x0172),
      error_record("Above ACL Packet not sent Handle 0x172"),
  };
  EXPECT_EQ(classify_feedback(window), Feedback::kNoDeviceHandle);
}

TEST(ClassifyFeedbackTest, EmptyWindowIsSilent) {
  EXPECT_EQ(classify_feedback({}), Feedback::kSilent);
}

TEST(ClassifyFeedbackTest, OtherErrorsAreMalformed) {
  const std::vector<pklog::LogRecord> window = {
      error_record("Malformed ACL buffer (empty payload)")};
  EXPECT_EQ(classify_feedback(window), Feedback::kMalformed);
}

TEST(ClassifyFeedbackTest, CompletionForOtherHandleIsNotSuccess) {
  const std::vector<pklog::LogRecord> window = {acl_sent_record(0x000B),
                                                nocp_record(0x000C)};
  EXPECT_EQ(classify_feedback(window), Feedback::kSilent);
}

TEST(InferArgOrderTest, SwappedHandleAndRequestNarrative) {
  auto stack = make_connected_stack();
  const Role roles[] = {Role::kHandle, Role::kRequest};
  const Permutation hidden = {1, 0};  // handle and request swapped

  const auto sentinels = default_sentinels(stack.live_handle);
  const auto callable =
      make_hidden_send(*stack.session, roles, hidden, stack.live_handle,
                       sentinels.data_tag);
  const auto verdict =
      infer_arg_order(callable, roles, *stack.session, sentinels);

  ASSERT_TRUE(verdict.decided);
  EXPECT_EQ(verdict.permutation, hidden);
  EXPECT_EQ(verdict.probes_used, 2u);
  ASSERT_EQ(verdict.evidence.size(), 2u);
  EXPECT_EQ(verdict.evidence[0].tried, Permutation({0, 1}));
  EXPECT_EQ(verdict.evidence[0].observed, Feedback::kNoDeviceHandle);
  EXPECT_EQ(verdict.evidence[1].tried, Permutation({1, 0}));
  EXPECT_EQ(verdict.evidence[1].observed, Feedback::kSuccess);
}

TEST(InferArgOrderTest, IdentityHiddenNeedsOneProbe) {
  auto stack = make_connected_stack();
  const Role roles[] = {Role::kHandle, Role::kRequest};
  const Permutation hidden = {0, 1};

  const auto sentinels = default_sentinels(stack.live_handle);
  const auto callable =
      make_hidden_send(*stack.session, roles, hidden, stack.live_handle,
                       sentinels.data_tag);
  const auto verdict =
      infer_arg_order(callable, roles, *stack.session, sentinels);
  ASSERT_TRUE(verdict.decided);
  EXPECT_EQ(verdict.probes_used, 1u);
  EXPECT_EQ(verdict.permutation, hidden);
}

TEST(InferArgOrderTest, ThreeRolesSolveWithinSixProbes) {
  const Role roles[] = {Role::kData, Role::kHandle, Role::kRequest};
  for (const auto& hidden : all_permutations(3)) {
    auto stack = make_connected_stack();
    const auto sentinels = default_sentinels(stack.live_handle);
    const auto callable =
        make_hidden_send(*stack.session, roles, hidden, stack.live_handle,
                         sentinels.data_tag);
    const auto verdict =
        infer_arg_order(callable, roles, *stack.session, sentinels);
    ASSERT_TRUE(verdict.decided) << render_evidence_table(roles, verdict);
    ASSERT_EQ(verdict.permutation, hidden);
    ASSERT_LE(verdict.probes_used, 6u);
  }
}

TEST(InferArgOrderTest, FourRolesCoverTheFullSignature) {
  const Role roles[] = {Role::kData, Role::kSize, Role::kHandle,
                        Role::kRequest};
  for (const auto& hidden : all_permutations(4)) {
    auto stack = make_connected_stack();
    const auto sentinels = default_sentinels(stack.live_handle);
    const auto callable =
        make_hidden_send(*stack.session, roles, hidden, stack.live_handle,
                         sentinels.data_tag);
    const auto verdict =
        infer_arg_order(callable, roles, *stack.session, sentinels);
    ASSERT_TRUE(verdict.decided) << render_evidence_table(roles, verdict);
    ASSERT_EQ(verdict.permutation, hidden);
    ASSERT_LE(verdict.probes_used, 24u);
  }
}

TEST(InferArgOrderTest, ReturnedPermutationReproducesSuccess) {
  auto stack = make_connected_stack();
  const Role roles[] = {Role::kData, Role::kHandle, Role::kRequest};
  const Permutation hidden = {2, 0, 1};
  const auto sentinels = default_sentinels(stack.live_handle);
  const auto callable =
      make_hidden_send(*stack.session, roles, hidden, stack.live_handle,
                       sentinels.data_tag);
  const auto verdict =
      infer_arg_order(callable, roles, *stack.session, sentinels);
  ASSERT_TRUE(verdict.decided);

  // Re-apply with fresh sentinel values.
  Sentinels fresh = sentinels;
  fresh.request_value = 0x0200;
  fresh.data_tag.assign(24, 0x5A);
  std::vector<ProbeValue> values;
  for (std::size_t p = 0; p < 3; ++p) {
    switch (roles[verdict.permutation[p]]) {
      case Role::kData:
        values.emplace_back(fresh.data_tag);
        break;
      case Role::kHandle:
        values.emplace_back(uint32_t{fresh.live_handle});
        break;
      default:
        values.emplace_back(fresh.request_value);
        break;
    }
  }
  const std::size_t mark = stack.capture->size();
  callable.invoke(values);
  stack.session->wait_quiescent(std::chrono::milliseconds(50));
  EXPECT_EQ(classify_feedback(stack.capture->snapshot_from(mark)),
            Feedback::kSuccess);
}

TEST(InferArgOrderTest, NoDeviceHandleNamesTheMisplacedSentinel) {
  auto stack = make_connected_stack();
  const Role roles[] = {Role::kHandle, Role::kRequest};
  const Permutation hidden = {1, 0};
  const auto sentinels = default_sentinels(stack.live_handle);
  const auto callable =
      make_hidden_send(*stack.session, roles, hidden, stack.live_handle,
                       sentinels.data_tag);

  const std::size_t mark = stack.capture->size();
  infer_arg_order(callable, roles, *stack.session, sentinels);

  bool found = false;
  for (const auto& record : stack.capture->snapshot_from(mark)) {
    if (record.kind == pklog::RecordKind::kError &&
        record.message ==
            pklog::format_no_device_handle_error(sentinels.request_value)) {
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(InferArgOrderTest, AdaptivePruningStaysCorrectAndNeverProbesMore) {
  const Role roles[] = {Role::kData, Role::kHandle, Role::kRequest};
  for (const auto& hidden : all_permutations(3)) {
    std::size_t plain_probes = 0;
    {
      auto stack = make_connected_stack();
      const auto sentinels = default_sentinels(stack.live_handle);
      const auto callable = make_hidden_send(
          *stack.session, roles, hidden, stack.live_handle, sentinels.data_tag);
      const auto verdict =
          infer_arg_order(callable, roles, *stack.session, sentinels);
      ASSERT_TRUE(verdict.decided);
      plain_probes = verdict.probes_used;
    }

    auto stack = make_connected_stack();
    const auto sentinels = default_sentinels(stack.live_handle);
    const auto callable = make_hidden_send(
        *stack.session, roles, hidden, stack.live_handle, sentinels.data_tag);
    ProbeOptions options;
    options.adaptive_pruning = true;
    const auto verdict =
        infer_arg_order(callable, roles, *stack.session, sentinels, options);
    ASSERT_TRUE(verdict.decided);
    ASSERT_EQ(verdict.permutation, hidden);
    ASSERT_LE(verdict.probes_used, plain_probes);
  }
}

TEST(InferArgOrderTest, UndecidableWhenNothingEverSucceeds) {
  auto stack = make_connected_stack();
  const Role roles[] = {Role::kHandle, Role::kRequest};

  BlackBoxCallable dead;
  dead.arity = 2;
  dead.invoke = [](std::span<const ProbeValue>) {};  // never sends

  const auto sentinels = default_sentinels(stack.live_handle);
  const auto verdict =
      infer_arg_order(dead, roles, *stack.session, sentinels);
  EXPECT_FALSE(verdict.decided);
  EXPECT_EQ(verdict.probes_used, 2u);
  for (const auto& entry : verdict.evidence) {
    EXPECT_EQ(entry.observed, Feedback::kSilent);
  }
}

TEST(InferArgOrderTest, EveryProbeLeavesANoteRecord) {
  auto stack = make_connected_stack();
  const Role roles[] = {Role::kHandle, Role::kRequest};
  const Permutation hidden = {1, 0};
  const auto sentinels = default_sentinels(stack.live_handle);
  const auto callable =
      make_hidden_send(*stack.session, roles, hidden, stack.live_handle,
                       sentinels.data_tag);

  const std::size_t mark = stack.capture->size();
  const auto verdict =
      infer_arg_order(callable, roles, *stack.session, sentinels);

  std::size_t notes = 0;
  for (const auto& record : stack.capture->snapshot_from(mark)) {
    notes += record.kind == pklog::RecordKind::kNote;
  }
  EXPECT_EQ(notes, verdict.probes_used + 1);  // one per probe plus verdict
}

TEST(InferArgOrderTest, IndistinguishableSentinelsAreRejected) {
  auto stack = make_connected_stack();
  const Role roles[] = {Role::kHandle, Role::kRequest};
  const Permutation hidden = {0, 1};
  auto sentinels = default_sentinels(stack.live_handle);
  sentinels.request_value = stack.live_handle;
  const auto callable =
      make_hidden_send(*stack.session, roles, hidden, stack.live_handle,
                       sentinels.data_tag);
  EXPECT_THROW(infer_arg_order(callable, roles, *stack.session, sentinels),
               std::invalid_argument);
}

TEST(EvidenceTableTest, RendersOneRowPerProbe) {
  auto stack = make_connected_stack();
  const Role roles[] = {Role::kHandle, Role::kRequest};
  const Permutation hidden = {1, 0};
  const auto sentinels = default_sentinels(stack.live_handle);
  const auto callable =
      make_hidden_send(*stack.session, roles, hidden, stack.live_handle,
                       sentinels.data_tag);
  const auto verdict =
      infer_arg_order(callable, roles, *stack.session, sentinels);

  const std::string table = render_evidence_table(roles, verdict);
  EXPECT_NE(table.find("(handle, request)"), std::string::npos);
  EXPECT_NE(table.find("NoDeviceHandle"), std::string::npos);
  EXPECT_NE(table.find("Success"), std::string::npos);
  EXPECT_NE(table.find("verdict: (request, handle)"), std::string::npos);
}

}  // namespace
}  // namespace btraw::probe
