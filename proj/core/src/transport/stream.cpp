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

#include "btraw/transport/stream.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "btraw/sim/controller.hpp"

namespace btraw::transport {
namespace {

// Idle window after which a serving side flushes delayed ACL completions.
constexpr int kServerIdlePollMs = 20;

bool send_all(int fd, std::span<const uint8_t> bytes, std::mutex& mutex) {
  std::lock_guard<std::mutex> lock(mutex);
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent,
                             MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) {
        continue;
      }
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

struct AddressParts {
  std::string host;
  std::string port;
};

AddressParts split_address(const std::string& address) {
  const std::size_t colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 ||
      colon + 1 >= address.size()) {
    throw BadConfigError("stream address must be host:port, got '" + address +
                         "'");
  }
  return {address.substr(0, colon), address.substr(colon + 1)};
}

}  // namespace

StreamServer::StreamServer(sim::ControllerProfile profile, uint16_t port)
    : profile_(std::move(profile)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) {
    throw BackendUnavailableError("socket(): " +
                                  std::string(std::strerror(errno)));
  }
  const int enable = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &enable, sizeof(enable));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) <
          0 ||
      ::listen(listen_fd_, 8) < 0) {
    const std::string what = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw BackendUnavailableError("bind/listen: " + what);
  }

  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);

  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

StreamServer::~StreamServer() { stop(); }

std::string StreamServer::address() const {
  return "127.0.0.1:" + std::to_string(port_);
}

void StreamServer::stop() {
  if (!running_.exchange(false)) {
    return;
  }
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (accept_thread_.joinable()) {
    accept_thread_.join();
  }
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(workers_mutex_);
    // Workers close their own fd on exit; only nudge them here.
    for (int fd : worker_fds_) {
      ::shutdown(fd, SHUT_RDWR);
    }
    workers.swap(workers_);
  }
  for (auto& worker : workers) {
    if (worker.joinable()) {
      worker.join();
    }
  }
}

void StreamServer::accept_loop() {
  while (running_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) {
        continue;
      }
      break;  // listener closed
    }
    std::lock_guard<std::mutex> lock(workers_mutex_);
    if (!running_) {
      ::close(fd);
      break;
    }
    worker_fds_.push_back(fd);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void StreamServer::serve_connection(int fd) {
  const int enable = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &enable, sizeof(enable));

  sim::Controller controller(profile_);
  std::mutex write_mutex;
  controller.set_host_sink([fd, &write_mutex](const hci::HciPacket& packet) {
    send_all(fd, hci::encode_h4(packet), write_mutex);
  });

  hci::H4StreamDecoder decoder;
  uint8_t buf[4096];
  while (running_) {
    pollfd pfd{fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kServerIdlePollMs);
    if (ready < 0) {
      if (errno == EINTR) {
        continue;
      }
      break;
    }
    if (ready == 0) {
      // Link idle: flush delayed completions so NOCP events reach the
      // host without further inbound traffic.
      controller.settle();
      continue;
    }
    const ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
    if (n <= 0) {
      break;
    }
    decoder.feed(std::span<const uint8_t>(buf, static_cast<std::size_t>(n)));
    while (true) {
      auto result = decoder.next();
      if (!result.ok()) {
        break;  // need more data, or desynchronized stream
      }
      controller.ingest(*result.packet);
    }
  }
  {
    std::lock_guard<std::mutex> lock(workers_mutex_);
    std::erase(worker_fds_, fd);
  }
  ::close(fd);
}

StreamTransport::StreamTransport(const std::string& address) {
  const AddressParts parts = split_address(address);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* results = nullptr;
  const int rc =
      ::getaddrinfo(parts.host.c_str(), parts.port.c_str(), &hints, &results);
  if (rc != 0) {
    throw BackendUnavailableError("cannot resolve '" + address +
                                  "': " + gai_strerror(rc));
  }

  int fd = -1;
  for (addrinfo* ai = results; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      continue;
    }
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      break;
    }
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(results);
  if (fd < 0) {
    throw BackendUnavailableError("cannot connect to '" + address + "'");
  }

  const int enable = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &enable, sizeof(enable));
  fd_ = fd;
  up_ = true;
  reader_ = std::thread([this] { reader_loop(); });
}

StreamTransport::~StreamTransport() {
  close();
  if (reader_.joinable()) {
    reader_.join();
  }
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void StreamTransport::reader_loop() {
  hci::H4StreamDecoder decoder;
  uint8_t buf[4096];
  while (up_) {
    const ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) {
        continue;
      }
      up_ = false;
      break;
    }
    decoder.feed(std::span<const uint8_t>(buf, static_cast<std::size_t>(n)));
    while (true) {
      auto result = decoder.next();
      if (!result.ok()) {
        break;
      }
      deliver(hci::encode_h4(*result.packet));
    }
  }
}

void StreamTransport::deliver(std::vector<uint8_t> frame) {
  FrameSink sink;
  {
    std::lock_guard<std::mutex> lock(state_mutex_);
    if (!sink_) {
      backlog_.push_back(std::move(frame));
      return;
    }
    sink = sink_;
  }
  sink(std::move(frame));
}

void StreamTransport::send(std::span<const uint8_t> h4_frame) {
  if (!up_) {
    throw TransportDownError("stream transport is down");
  }
  if (!send_all(fd_, h4_frame, write_mutex_)) {
    up_ = false;
    throw TransportDownError("stream transport peer closed the connection");
  }
}

void StreamTransport::set_frame_sink(FrameSink sink) {
  std::vector<std::vector<uint8_t>> backlog;
  FrameSink installed;
  {
    std::lock_guard<std::mutex> lock(state_mutex_);
    sink_ = std::move(sink);
    backlog.swap(backlog_);
    installed = sink_;
  }
  if (installed) {
    for (auto& frame : backlog) {
      installed(std::move(frame));
    }
  }
}

bool StreamTransport::is_up() const { return up_; }

void StreamTransport::close() {
  // The fd stays open until destruction so the reader never races a
  // descriptor reuse; shutdown is enough to wake it.
  if (up_.exchange(false)) {
    ::shutdown(fd_, SHUT_RDWR);
  }
}

}  // namespace btraw::transport
