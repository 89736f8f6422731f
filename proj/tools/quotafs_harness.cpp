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

// quotafs-harness: scenario driver and create-latency benchmark.
//
//   quotafs-harness run <scenario-file> [--server URL --token TOK]
//   quotafs-harness fuzz --seed N [--steps M]
//   quotafs-harness bench --files N [--quota] [--scanner]

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <string>

#include "quotafs/harness.hpp"

using namespace quotafs;

namespace {

// Runs against an external server when --server is given, otherwise spins
// up an embedded ephemeral service.
int with_client(const std::string& server, const std::string& token,
                const std::function<int(RestClient&)>& fn) {
  if (!server.empty()) {
    RestClient client(server, token);
    return fn(client);
  }
  auto embedded = harness::EmbeddedServer::start();
  if (!embedded.is_ok()) {
    std::fprintf(stderr, "error: %s\n", embedded.status().to_string().c_str());
    return 1;
  }
  RestClient client(embedded.value()->base_url(), harness::EmbeddedServer::kAdminToken);
  return fn(client);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quotafs workload harness"};
  app.require_subcommand(1);

  std::string server;
  std::string token;
  app.add_option("--server", server, "service base URL (default: embedded instance)");
  app.add_option("--token", token, "bearer token for --server");

  auto* run_cmd = app.add_subcommand("run", "execute a scenario file");
  run_cmd->fallthrough();
  std::string scenario_file;
  run_cmd->add_option("scenario", scenario_file, "scenario file")->required();

  auto* fuzz_cmd = app.add_subcommand("fuzz", "randomized run checked against a reference model");
  fuzz_cmd->fallthrough();
  std::uint64_t seed = 1;
  std::size_t steps = 500;
  fuzz_cmd->add_option("--seed", seed, "RNG seed");
  fuzz_cmd->add_option("--steps", steps, "number of steps");

  auto* bench_cmd = app.add_subcommand("bench", "measure create-entry latency percentiles");
  bench_cmd->fallthrough();
  std::size_t files = 10'000;
  bool with_quota = false;
  bool with_scanner = false;
  bench_cmd->add_option("--files", files, "number of entries to create");
  bench_cmd->add_flag("--quota", with_quota, "configure quotas for the writing identity");
  bench_cmd->add_flag("--scanner", with_scanner, "loop aggregation scans during the run");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    auto scenario = harness::Scenario::load(scenario_file);
    if (!scenario.is_ok()) {
      std::fprintf(stderr, "error: %s\n", scenario.status().to_string().c_str());
      return 1;
    }
    return with_client(server, token, [&](RestClient& client) {
      auto report = harness::run_scenario(client, scenario.value());
      std::fputs(report.to_string().c_str(), stdout);
      return report.passed ? 0 : 1;
    });
  }

  if (fuzz_cmd->parsed()) {
    return with_client(server, token, [&](RestClient& client) {
      auto report = harness::run_fuzz(client, seed, steps);
      if (!report.is_ok()) {
        std::fprintf(stderr, "error: %s\n", report.status().to_string().c_str());
        return 1;
      }
      std::fputs(report->trace.c_str(), stdout);
      std::printf("seed=%llu steps=%zu divergences=%zu\n",
                  static_cast<unsigned long long>(report->seed), report->steps_run,
                  report->divergences);
      return report->divergences == 0 ? 0 : 1;
    });
  }

  // bench
  harness::BenchMode mode = harness::BenchMode::kNoQuota;
  if (with_scanner) mode = harness::BenchMode::kQuotaWithScanner;
  else if (with_quota) mode = harness::BenchMode::kQuota;
  auto stats = harness::measure_create_latency(files, mode);
  if (!stats.is_ok()) {
    std::fprintf(stderr, "error: %s\n", stats.status().to_string().c_str());
    return 1;
  }
  std::printf("%s\n", stats->to_string().c_str());
  return 0;
}
