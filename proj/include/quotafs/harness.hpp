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

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "quotafs/config.hpp"
#include "quotafs/rest_client.hpp"
#include "quotafs/rest_server.hpp"
#include "quotafs/service.hpp"
#include "quotafs/status.hpp"
#include "quotafs/types.hpp"

namespace quotafs::harness {

// Line-oriented scenario text, one action per line:
//
//   seed 42
//   set-limit user 1000 custodial=10 [replica=<n>|none] [output=<n>|none]
//   mkdir /data uid=0 gid=0
//   create /data/f1 uid=1000 gid=2000 [policy=CUSTODIAL] [latency=NEARLINE]
//          [expect=ok|quota-exceeded]
//   commit /data/f1 size=12
//   remove /data/f1
//   scan
//   assert-check uid=1000 gid=2000 policy=CUSTODIAL expect=allow|deny
enum class ActionKind { kSetLimit, kMkdir, kCreate, kCommit, kRemove, kScan, kAssertCheck };

struct ScenarioStep {
  int line_no = 0;
  std::string raw;
  ActionKind kind = ActionKind::kScan;

  std::string path;
  ScopeKind scope = ScopeKind::kUser;
  std::uint32_t id = 0;
  std::uint32_t uid = 0;
  std::uint32_t gid = 0;
  std::optional<RetentionPolicy> policy;
  std::optional<AccessLatency> latency;
  std::uint64_t size = 0;
  LimitsPatch limits;
  std::string expect;  // "", "ok", "quota-exceeded", "allow", "deny"
};

struct Scenario {
  std::uint64_t seed = 0;
  std::vector<ScenarioStep> steps;

  static Result<Scenario> parse(std::string_view text);
  static Result<Scenario> load(const std::filesystem::path& file);
};

struct StepTrace {
  int line_no = 0;
  std::string action;
  std::string outcome;
  std::string expected;
  bool pass = true;
};

struct ScenarioReport {
  bool passed = true;
  std::vector<StepTrace> steps;
  std::string to_string() const;  // one line per step plus a summary line
};

// Runs every step against the service behind `client`. Steps with an
// expectation record pass/fail; any unexpected API failure fails the step.
ScenarioReport run_scenario(RestClient& client, const Scenario& scenario);

// In-process service + REST endpoint on a loopback port, with one admin
// and one user token preconfigured. The default service is ephemeral.
class EmbeddedServer {
 public:
  static constexpr const char* kAdminToken = "harness-admin";
  static constexpr const char* kUserToken = "harness-user";

  static Result<std::unique_ptr<EmbeddedServer>> start(ServiceOptions options = {});

  Service& service() { return *service_; }
  int port() const { return port_; }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  std::unique_ptr<Service> service_;
  std::unique_ptr<RestServer> rest_;
  int port_ = 0;
};

// Mirror of the service's intended semantics, used as the oracle for
// randomized runs: usage moves only at scan steps, checks compare cached
// usage against limits with >= on both scopes.
class ReferenceModel {
 public:
  struct ModelFile {
    std::uint32_t uid = 0;
    std::uint32_t gid = 0;
    RetentionPolicy policy = RetentionPolicy::kReplica;
    std::uint64_t size = 0;
  };

  void set_limits(const QuotaKey& key, const LimitsPatch& patch);
  bool create(const std::string& path, const ModelFile& file);  // false = exists
  bool commit(const std::string& path, std::uint64_t size);     // false = missing
  bool remove(const std::string& path);                         // false = missing
  void scan();                                                  // recompute usage
  bool check_allowed(std::uint32_t uid, std::uint32_t gid, RetentionPolicy policy) const;

  const std::map<std::string, ModelFile>& files() const { return files_; }
  std::map<QuotaKey, PolicyBytes> aggregate() const;  // live brute-force sums

 private:
  bool scope_over(const QuotaKey& key, RetentionPolicy policy) const;

  std::map<std::string, ModelFile> files_;
  std::map<QuotaKey, QuotaLimits> limits_;
  std::map<QuotaKey, PolicyBytes> usage_;  // as of last scan()
};

struct FuzzReport {
  std::uint64_t seed = 0;
  std::size_t steps_run = 0;
  std::size_t divergences = 0;
  std::string trace;  // deterministic per seed
};

// Seeded random walk executed against both the live service and the
// reference model; every allow/deny and error outcome must agree.
Result<FuzzReport> run_fuzz(RestClient& client, std::uint64_t seed, std::size_t steps);

struct LatencyStats {
  std::size_t samples = 0;
  double p50_us = 0;
  double p95_us = 0;
  double p99_us = 0;
  std::uint64_t traversals_delta = 0;    // namespace-wide traversals during the run
  std::uint64_t cache_lookups_delta = 0; // quota-cache lookups during the run
  std::uint64_t scans_completed = 0;
  std::string to_string() const;
};

enum class BenchMode { kNoQuota, kQuota, kQuotaWithScanner };

// Creates n_files entries in-process on a fresh ephemeral service and
// reports per-create latency percentiles.
Result<LatencyStats> measure_create_latency(
    std::size_t n_files, BenchMode mode,
    std::chrono::milliseconds scan_interval = std::chrono::milliseconds(5));

}  // namespace quotafs::harness
