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

#include "btraw/dispatch/session.hpp"

#include <gtest/gtest.h>

#include <random>

#include "btraw/hci/constants.hpp"
#include "btraw/pklog/render.hpp"
#include "btraw/transport/sim_transport.hpp"

namespace btraw::dispatch {
namespace {

struct Stack {
  std::shared_ptr<transport::SimTransport> transport;
  std::shared_ptr<pklog::CaptureLog> capture;
  std::unique_ptr<RawDispatchSession> session;
};

Stack make_stack(sim::ControllerProfile profile = {}) {
  Stack stack;
  stack.transport = std::make_shared<transport::SimTransport>(profile);
  stack.capture = std::make_shared<pklog::CaptureLog>();
  stack.session =
      std::make_unique<RawDispatchSession>(stack.transport, stack.capture);
  return stack;
}

std::vector<uint8_t> create_connection_buffer(uint8_t peer_byte = 0x01) {
  const std::vector<uint8_t> params = {peer_byte, 0x00, 0x00, 0x00, 0xFE,
                                       0xCA, 0x18, 0xCC, 0x01, 0x00,
                                       0x00, 0x00, 0x01};
  return hci::raw_command_buffer(hci::kOpcodeCreateConnection, params);
}

uint16_t connect(Stack& stack, uint32_t request = 1) {
  EXPECT_TRUE(
      stack.session->send_raw_command(request, create_connection_buffer())
          .ok());
  const auto handles = stack.session->live_handles();
  EXPECT_FALSE(handles.empty());
  return handles.empty() ? 0 : handles.front();
}

std::vector<pklog::LogRecord> records_since(const Stack& stack,
                                            std::size_t mark) {
  return stack.capture->snapshot_from(mark);
}

bool has_error_record(const std::vector<pklog::LogRecord>& records) {
  for (const auto& record : records) {
    if (record.kind == pklog::RecordKind::kError) {
      return true;
    }
  }
  return false;
}

TEST(SendRawCommandTest, ResetSucceedsAndLogsCommandThenEvent) {
  auto stack = make_stack();
  const auto status = stack.session->send_raw_command(
      1, hci::raw_command_buffer(hci::kOpcodeReset, {}));
  EXPECT_EQ(status.code, kStatusOk);

  const auto records = stack.capture->snapshot();
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].kind, pklog::RecordKind::kCommand);
  EXPECT_EQ(records[0].message, "Reset - Request: 0x0001");
  EXPECT_EQ(records[0].payload,
            std::vector<uint8_t>({0x03, 0x0C, 0x00}));
  EXPECT_EQ(records[1].kind, pklog::RecordKind::kEvent);
  EXPECT_EQ(records[1].message,
            "Command Complete - Opcode: 0x0C03 - Status: 0x00");

  // The response is queued for asynchronous consumption too.
  const auto events = stack.session->wait_events();
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(std::get<hci::EventPacket>(events[0]).code,
            hci::kEventCommandComplete);
}

TEST(SendRawCommandTest, EmptyBufferIsMalformed) {
  auto stack = make_stack();
  const auto status = stack.session->send_raw_command(1, {});
  EXPECT_EQ(status.code, kStatusMalformedBuffer);
  const auto records = stack.capture->snapshot();
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].kind, pklog::RecordKind::kError);
}

TEST(SendRawCommandTest, LengthFieldMismatchIsMalformed) {
  auto stack = make_stack();
  const std::vector<uint8_t> lying = {0x03, 0x0C, 0x05};
  EXPECT_EQ(stack.session->send_raw_command(1, lying).code,
            kStatusMalformedBuffer);
  const std::vector<uint8_t> trailing = {0x03, 0x0C, 0x00, 0xAA};
  EXPECT_EQ(stack.session->send_raw_command(2, trailing).code,
            kStatusMalformedBuffer);
}

TEST(SendRawCommandTest, VendorReadRamCarriesRamBytes) {
  auto stack = make_stack();
  const std::vector<uint8_t> write_params = {0x00, 0x00, 0x20, 0x00,
                                             0xDE, 0xAD, 0xBE, 0xEF};
  ASSERT_TRUE(stack.session
                  ->send_raw_command(7, hci::raw_command_buffer(
                                            hci::Opcode(0x3F, 0x4C),
                                            write_params))
                  .ok());
  stack.session->drain_events();

  const std::vector<uint8_t> read_params = {0x00, 0x00, 0x20, 0x00, 0x04};
  ASSERT_TRUE(stack.session
                  ->send_raw_command(8, hci::raw_command_buffer(
                                            hci::Opcode(0x3F, 0x4D),
                                            read_params))
                  .ok());
  const auto events = stack.session->wait_events();
  ASSERT_EQ(events.size(), 1u);
  const auto& complete = std::get<hci::EventPacket>(events[0]);
  ASSERT_EQ(complete.code, hci::kEventCommandComplete);
  EXPECT_EQ(std::vector<uint8_t>(complete.params.begin() + 4,
                                 complete.params.end()),
            std::vector<uint8_t>({0xDE, 0xAD, 0xBE, 0xEF}));
}

TEST(SendRawAclTest, LiveHandleLogsSendThenCompletion) {
  auto stack = make_stack();
  const uint16_t handle = connect(stack);
  ASSERT_EQ(handle, 0x000B);

  const std::size_t mark = stack.capture->size();
  const std::vector<uint8_t> payload(16, 0x61);
  const auto status = stack.session->send_raw_acl(payload, handle, 0x0172);
  EXPECT_EQ(status.code, kStatusOk);

  const auto records = records_since(stack, mark);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(pklog::render_text_tail(records[0]),
            "LEAS Send 0x000B \xE2\x96\xB6 Data [Handle: 0x000B, Packet "
            "Boundary Flags: 0x3, Length: 0x0010 (16)]");
  EXPECT_EQ(pklog::render_text_tail(records[1]),
            "HCI Event 0x000B \xE2\x96\xB6 Number of Completed Packets - "
            "Handle: 0x000B - Packets: 0x0001");
  EXPECT_EQ(records[0].payload, payload);
}

TEST(SendRawAclTest, SwappedArgumentsReproduceTheErrorTriple) {
  auto stack = make_stack();
  const uint16_t live = connect(stack);
  ASSERT_EQ(live, 0x000B);

  const std::size_t mark = stack.capture->size();
  // Handle and request swapped: the handle position receives 0x0172.
  const std::vector<uint8_t> payload(16, 0x61);
  const auto status = stack.session->send_raw_acl(payload, 0x0172, live);
  EXPECT_EQ(status.code, kStatusNoDeviceHandle);
  EXPECT_TRUE(status.transport_error());

  const auto records = records_since(stack, mark);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].kind, pklog::RecordKind::kError);
  EXPECT_EQ(records[0].message, "ACLPacketToHw No Device Handle 0x172");
  EXPECT_EQ(records[1].kind, pklog::RecordKind::kAclSent);
  EXPECT_EQ(records[1].message,
            "Data [Handle: 0x0172, Packet Boundary Flags: 0x3, Length: "
            "0x0010 (16)]");
  EXPECT_EQ(records[2].kind, pklog::RecordKind::kError);
  EXPECT_EQ(records[2].message, "Above ACL Packet not sent Handle 0x172");

  // Nothing reached the controller.
  EXPECT_TRUE(stack.session->wait_events().empty());
}

TEST(SendRawAclTest, SwappedArgumentsAlwaysNameTheMisplacedValue) {
  auto stack = make_stack();
  const uint16_t live = connect(stack);

  std::mt19937_64 rng(0x51AB);
  for (int i = 0; i < 50; ++i) {
    uint32_t request = static_cast<uint32_t>(
        rng() % (hci::ConnectionHandle::kMaxValid + 1));
    if (request == live) {
      request += 1;
    }
    const std::size_t mark = stack.capture->size();
    const std::vector<uint8_t> payload(4, 0x00);
    const auto status = stack.session->send_raw_acl(payload, request, live);
    ASSERT_EQ(status.code, kStatusNoDeviceHandle);
    const auto records = records_since(stack, mark);
    ASSERT_EQ(records.size(), 3u);
    ASSERT_EQ(records[0].message,
              pklog::format_no_device_handle_error(request));
  }
}

TEST(SendRawAclTest, OutOfRangeHandleIsAnArgumentError) {
  auto stack = make_stack();
  connect(stack);
  const std::size_t mark = stack.capture->size();
  const std::vector<uint8_t> payload(4, 0x00);
  const auto status = stack.session->send_raw_acl(payload, 0xFFFF, 1);
  EXPECT_EQ(status.code, kStatusHandleOutOfRange);
  EXPECT_TRUE(status.argument_error());

  const auto records = records_since(stack, mark);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].kind, pklog::RecordKind::kError);
  EXPECT_EQ(records[0].message.find("ACLPacketToHw"), std::string::npos);
}

TEST(SendRawAclTest, EmptyAndOversizedPayloadsAreMalformed) {
  auto stack = make_stack();
  const uint16_t live = connect(stack);
  EXPECT_EQ(stack.session->send_raw_acl({}, live, 1).code,
            kStatusMalformedBuffer);
  const std::vector<uint8_t> oversized(0x10000, 0xAA);
  EXPECT_EQ(stack.session->send_raw_acl(oversized, live, 1).code,
            kStatusMalformedBuffer);
}

TEST(DispatchInvariantTest, EveryCallLogsAndStatusTracksErrorRecords) {
  auto stack = make_stack();
  const uint16_t live = connect(stack);

  std::mt19937_64 rng(0xDEED);
  for (int i = 0; i < 200; ++i) {
    const std::size_t mark = stack.capture->size();
    DispatchStatus status;
    switch (rng() % 5) {
      case 0:
        status = stack.session->send_raw_command(
            static_cast<uint32_t>(rng()),
            hci::raw_command_buffer(hci::kOpcodeReadBdAddr, {}));
        break;
      case 1:
        status = stack.session->send_raw_command(1, {});  // malformed
        break;
      case 2: {
        const std::vector<uint8_t> payload(1 + rng() % 32, 0x42);
        status = stack.session->send_raw_acl(payload, live, 1);
        break;
      }
      case 3: {
        const std::vector<uint8_t> payload(4, 0x42);
        status = stack.session->send_raw_acl(payload, 0x0172, 1);  // dead
        break;
      }
      default: {
        const std::vector<uint8_t> payload(4, 0x42);
        status = stack.session->send_raw_acl(payload, 0xFFFF, 1);  // range
        break;
      }
    }
    const auto records = records_since(stack, mark);
    ASSERT_GE(records.size(), 1u);  // every call appends something
    ASSERT_EQ(status.ok(), !has_error_record(records));
  }
}

TEST(UserClientTest, UnknownSelectorThrows) {
  auto stack = make_stack();
  const std::vector<uint8_t> anything = {0x01};
  EXPECT_THROW(stack.session->dispatch_user_client(0x99, anything),
               UnknownSelectorError);
  try {
    stack.session->dispatch_user_client(0x99, anything);
  } catch (const UnknownSelectorError& error) {
    EXPECT_EQ(error.selector(), 0x99u);
  }
}

TEST(UserClientTest, RegisteredSelectorsReturnZeroStatusBuffer) {
  auto stack = make_stack();
  const auto hci_status = stack.session->dispatch_user_client(
      kSelectorSendHci, hci::encode_h4(hci::CommandPacket{hci::kOpcodeReset, {}}));
  EXPECT_EQ(hci_status, std::vector<uint8_t>{0x00});
  auto events = stack.session->wait_events();
  ASSERT_EQ(events.size(), 1u);

  connect(stack, 2);
  stack.session->drain_events();
  hci::AclDataPacket acl;
  acl.handle = hci::ConnectionHandle(0x000B);
  acl.pb_flag = 0x3;
  acl.payload = {1, 2, 3};
  const auto acl_status = stack.session->dispatch_user_client(
      kSelectorSendAcl, hci::encode_h4(hci::HciPacket{acl}));
  EXPECT_EQ(acl_status, std::vector<uint8_t>{0x00});
  events = stack.session->wait_events();
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(std::get<hci::EventPacket>(events[0]).code,
            hci::kEventNumberOfCompletedPackets);
}

TEST(DispatchTransportTest, ClosedTransportYieldsPositiveStatus) {
  auto stack = make_stack();
  const uint16_t live = connect(stack);
  stack.transport->close();

  const std::size_t mark = stack.capture->size();
  auto status = stack.session->send_raw_command(
      1, hci::raw_command_buffer(hci::kOpcodeReset, {}));
  EXPECT_EQ(status.code, kStatusTransportDown);
  EXPECT_TRUE(status.transport_error());
  EXPECT_TRUE(has_error_record(records_since(stack, mark)));

  const std::vector<uint8_t> payload(4, 0);
  status = stack.session->send_raw_acl(payload, live, 1);
  EXPECT_EQ(status.code, kStatusTransportDown);
}

TEST(DispatchSessionTest, EventSinkSeesAsynchronousDelivery) {
  auto stack = make_stack();
  std::vector<uint8_t> seen_codes;
  stack.session->set_event_sink([&seen_codes](const hci::HciPacket& packet) {
    if (const auto* event = std::get_if<hci::EventPacket>(&packet)) {
      seen_codes.push_back(event->code);
    }
  });
  stack.session->send_raw_command(
      1, hci::raw_command_buffer(hci::kOpcodeReset, {}));
  EXPECT_EQ(seen_codes,
            std::vector<uint8_t>({hci::kEventCommandComplete}));
}

TEST(DispatchSessionTest, HandleTableFollowsConnectionLifecycle) {
  auto stack = make_stack();
  const uint16_t handle = connect(stack);
  EXPECT_TRUE(stack.session->is_live(handle));

  const std::vector<uint8_t> disconnect_params = {
      static_cast<uint8_t>(handle & 0xFF), static_cast<uint8_t>(handle >> 8),
      0x13};
  stack.session->send_raw_command(
      2, hci::raw_command_buffer(hci::kOpcodeDisconnect, disconnect_params));
  EXPECT_FALSE(stack.session->is_live(handle));

  connect(stack, 3);
  ASSERT_FALSE(stack.session->live_handles().empty());
  stack.session->send_raw_command(
      4, hci::raw_command_buffer(hci::kOpcodeReset, {}));
  EXPECT_TRUE(stack.session->live_handles().empty());
}

}  // namespace
}  // namespace btraw::dispatch
