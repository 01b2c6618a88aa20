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

#include <csignal>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "btraw/shell/shell.hpp"
#include "btraw/sim/profile.hpp"
#include "btraw/transport/stream.hpp"
#include "btraw/transport/transport.hpp"

namespace {

constexpr int kExitSetupFailure = 2;

/// "sim", "stream:<host:port>" or "replay:<file>".
btraw::transport::TransportConfig parse_transport_spec(
    const std::string& spec) {
  btraw::transport::TransportConfig config;
  if (spec == "sim") {
    config.kind = btraw::transport::TransportKind::kInProcessSim;
    return config;
  }
  if (spec.rfind("stream:", 0) == 0) {
    config.kind = btraw::transport::TransportKind::kFramedStream;
    config.address = spec.substr(7);
    return config;
  }
  if (spec.rfind("replay:", 0) == 0) {
    config.kind = btraw::transport::TransportKind::kReplay;
    config.capture_path = spec.substr(7);
    return config;
  }
  throw btraw::transport::BadConfigError(
      "transport must be sim, stream:<host:port> or replay:<file>");
}

int run_serve(const btraw::sim::ControllerProfile& profile, uint16_t port) {
  btraw::transport::StreamServer server(profile, port);
  std::cout << "serving simulated controller on " << server.address()
            << std::endl;
  // Runs until interrupted.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  int sig = 0;
  sigwait(&set, &sig);
  std::cout << "\nstopping" << std::endl;
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"raw Bluetooth HCI/ACL access sandbox"};
  app.require_subcommand(0, 1);

  std::string transport_spec = "sim";
  std::string profile_path;
  std::string capture_path;
  uint64_t seed = 0;
  bool seed_given = false;
  bool paced = false;

  app.add_option("--transport", transport_spec,
                 "sim | stream:<host:port> | replay:<file>");
  app.add_option("--profile", profile_path,
                 "controller profile file (key = value lines)");
  app.add_option("--capture", capture_path,
                 "export the capture to this file on exit");
  app.add_option("--seed", seed, "controller determinism seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  app.add_flag("--paced", paced, "replay at recorded timestamps");

  auto* batch = app.add_subcommand("batch", "run a script of shell commands");
  std::string script_path;
  batch->add_option("script", script_path, "script file, one command per line")
      ->required();

  auto* repl = app.add_subcommand("repl", "interactive shell (default)");

  auto* serve =
      app.add_subcommand("serve", "serve a simulated controller over TCP");
  uint16_t serve_port = 0;
  serve->add_option("--port", serve_port, "listen port (0 = ephemeral)");

  CLI11_PARSE(app, argc, argv);

  try {
    btraw::sim::ControllerProfile profile;
    if (!profile_path.empty()) {
      profile = btraw::sim::load_profile_file(profile_path);
    }
    if (seed_given) {
      profile.seed = seed;
    }

    if (serve->parsed()) {
      return run_serve(profile, serve_port);
    }

    btraw::shell::ShellConfig config;
    config.transport = parse_transport_spec(transport_spec);
    config.transport.profile = profile;
    config.transport.replay_recorded_pacing = paced;
    config.capture_export_path = capture_path;

    btraw::shell::Shell shell(config, std::cout, std::cerr);
    if (batch->parsed()) {
      std::ifstream script(script_path);
      if (!script) {
        std::cerr << "cannot open script: " << script_path << '\n';
        return kExitSetupFailure;
      }
      return shell.run_script(script);
    }
    (void)repl;
    return shell.run_repl(std::cin);
  } catch (const std::exception& error) {
    std::cerr << "setup failed: " << error.what() << '\n';
    return kExitSetupFailure;
  }
}
