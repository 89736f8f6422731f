// Copyright 2026 The quotafs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// quotafsd: the namespace/quota service daemon.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "quotafs/config.hpp"
#include "quotafs/rest_server.hpp"
#include "quotafs/service.hpp"

namespace {
std::atomic<bool> g_stop{false};
void handle_signal(int) { g_stop.store(true); }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quotafs namespace and quota service"};
  std::string config_file;
  std::string data_dir;
  int port = -1;
  bool ephemeral = false;
  bool fsync = false;
  app.add_option("--config", config_file, "key=value config file");
  app.add_option("--data-dir", data_dir, "journal/snapshot directory (overrides config)");
  app.add_option("--port", port, "HTTP port (overrides config)");
  app.add_flag("--ephemeral", ephemeral, "run without persistence");
  app.add_flag("--fsync", fsync, "fdatasync every journal append");
  CLI11_PARSE(app, argc, argv);

  quotafs::Config cfg;
  if (!config_file.empty()) {
    auto loaded = quotafs::Config::load(config_file);
    if (!loaded.is_ok()) {
      std::fprintf(stderr, "error: %s\n", loaded.status().to_string().c_str());
      return 1;
    }
    cfg = loaded.take();
  }
  if (port >= 0) cfg.port = static_cast<std::uint16_t>(port);
  if (!data_dir.empty()) {
    cfg.data_dir = data_dir;
  } else if (cfg.data_dir.empty()) {
    if (const char* env = std::getenv("DATA_DIR"); env != nullptr && *env != '\0') {
      cfg.data_dir = env;
    }
  }
  if (fsync) cfg.journal_fsync = true;

  if (!ephemeral && cfg.data_dir.empty()) {
    std::fprintf(stderr,
                 "error: no data dir configured (use data-dir=, --data-dir, DATA_DIR, or "
                 "--ephemeral)\n");
    return 1;
  }

  quotafs::ServiceOptions options;
  if (!ephemeral) options.data_dir = cfg.data_dir;
  options.journal_fsync = cfg.journal_fsync;
  options.scan_interval = cfg.scan_interval;
  options.scan_enabled = cfg.scan_enabled;

  auto svc = quotafs::Service::open(options);
  if (!svc.is_ok()) {
    std::fprintf(stderr, "error: %s\n", svc.status().to_string().c_str());
    return 1;
  }
  if (svc.value()->replay_truncated()) {
    std::fprintf(stderr, "warning: journal tail discarded (%s)\n",
                 svc.value()->replay_detail().c_str());
  }

  quotafs::RestServer rest(*svc.value(), cfg);
  auto bound = rest.start();
  if (!bound.is_ok()) {
    std::fprintf(stderr, "error: %s\n", bound.status().to_string().c_str());
    return 1;
  }

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::printf("quotafsd listening on port %d (%s)\n", bound.value(),
              ephemeral ? "ephemeral" : cfg.data_dir.string().c_str());
  std::fflush(stdout);

  while (!g_stop.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  std::printf("shutting down\n");
  rest.stop();
  return 0;
}
