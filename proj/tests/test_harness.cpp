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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quotafs/harness.hpp"

using namespace quotafs;
using namespace quotafs::harness;

namespace {

const char* kLagScenario = R"(
seed 7
set-limit user 1000 custodial=10
create /big uid=1000 gid=2000 policy=CUSTODIAL
commit /big size=12
assert-check uid=1000 gid=2000 policy=CUSTODIAL expect=allow
scan
assert-check uid=1000 gid=2000 policy=CUSTODIAL expect=deny
remove /big
assert-check uid=1000 gid=2000 policy=CUSTODIAL expect=deny
scan
assert-check uid=1000 gid=2000 policy=CUSTODIAL expect=allow
)";

}  // namespace

TEST_CASE("scenario parse: verbs, arguments, seed") {
  auto scenario = Scenario::parse(kLagScenario);
  REQUIRE(scenario.is_ok());
  CHECK(scenario->seed == 7);
  REQUIRE(scenario->steps.size() == 10);
  CHECK(scenario->steps[0].kind == ActionKind::kSetLimit);
  CHECK(scenario->steps[0].limits.custodial.has_value());
  CHECK(scenario->steps[1].kind == ActionKind::kCreate);
  CHECK(scenario->steps[1].policy == RetentionPolicy::kCustodial);
  CHECK(scenario->steps[2].size == 12);
  CHECK(scenario->steps[3].expect == "allow");
}

TEST_CASE("scenario parse errors carry the line number") {
  auto bad_verb = Scenario::parse("explode /f\n");
  REQUIRE_FALSE(bad_verb.is_ok());
  CHECK(bad_verb.status().message().find("line 1") != std::string::npos);

  auto bad_arg = Scenario::parse("\ncreate /f uid=abc gid=1\n");
  REQUIRE_FALSE(bad_arg.is_ok());
  CHECK(bad_arg.status().message().find("line 2") != std::string::npos);

  CHECK_FALSE(Scenario::parse("create relative-path uid=1 gid=1\n").is_ok());
  CHECK_FALSE(Scenario::parse("assert-check uid=1 gid=1 policy=REPLICA\n").is_ok());
  CHECK_FALSE(Scenario::parse("remove /f expect=ok\n").is_ok());
  CHECK_FALSE(Scenario::parse("scan now\n").is_ok());
}

TEST_CASE("empty scenario passes trivially") {
  auto server = EmbeddedServer::start();
  REQUIRE(server.is_ok());
  RestClient client(server.value()->base_url(), EmbeddedServer::kAdminToken);

  auto scenario = Scenario::parse("# nothing here\n\n");
  REQUIRE(scenario.is_ok());
  auto report = run_scenario(client, scenario.value());
  CHECK(report.passed);
  CHECK(report.steps.empty());
  CHECK(report.to_string() == "PASS: 0/0 steps\n");
}

TEST_CASE("canonical lag scenario passes end to end") {
  auto server = EmbeddedServer::start();
  REQUIRE(server.is_ok());
  RestClient client(server.value()->base_url(), EmbeddedServer::kAdminToken);

  auto scenario = Scenario::parse(kLagScenario);
  REQUIRE(scenario.is_ok());
  auto report = run_scenario(client, scenario.value());
  INFO(report.to_string());
  CHECK(report.passed);
  REQUIRE(report.steps.size() == 10);
  CHECK(report.steps[3].outcome == "allow");
  CHECK(report.steps[5].outcome == "deny");
  CHECK(report.steps[7].outcome == "deny");
  CHECK(report.steps[9].outcome == "allow");
}

TEST_CASE("a violated expectation fails the report") {
  auto server = EmbeddedServer::start();
  REQUIRE(server.is_ok());
  RestClient client(server.value()->base_url(), EmbeddedServer::kAdminToken);

  auto scenario = Scenario::parse("assert-check uid=1 gid=1 policy=REPLICA expect=deny\n");
  REQUIRE(scenario.is_ok());
  auto report = run_scenario(client, scenario.value());
  CHECK_FALSE(report.passed);
  CHECK(report.steps[0].outcome == "allow");
}

TEST_CASE("fuzz: service agrees with the reference model across seeds") {
  for (std::uint64_t seed : {1ull, 2ull, 42ull}) {
    auto server = EmbeddedServer::start();
    REQUIRE(server.is_ok());
    RestClient client(server.value()->base_url(), EmbeddedServer::kAdminToken);
    auto report = run_fuzz(client, seed, 300);
    REQUIRE(report.is_ok());
    INFO(report->trace);
    CHECK(report->steps_run == 300);
    CHECK(report->divergences == 0);
  }
}

TEST_CASE("fuzz replay with the same seed is bit-identical") {
  std::string first;
  for (int round = 0; round < 2; ++round) {
    auto server = EmbeddedServer::start();
    REQUIRE(server.is_ok());
    RestClient client(server.value()->base_url(), EmbeddedServer::kAdminToken);
    auto report = run_fuzz(client, 1234, 200);
    REQUIRE(report.is_ok());
    REQUIRE(report->divergences == 0);
    if (round == 0) first = report->trace;
    else CHECK(report->trace == first);
  }
}

TEST_CASE("reference model aggregates like a brute-force sum") {
  ReferenceModel model;
  model.create("/a", {1, 2, RetentionPolicy::kCustodial, 0});
  model.commit("/a", 5);
  model.create("/b", {1, 2, RetentionPolicy::kCustodial, 0});
  model.commit("/b", 7);
  model.create("/c", {1, 3, RetentionPolicy::kReplica, 0});
  model.commit("/c", 3);

  auto agg = model.aggregate();
  CHECK(agg.at(QuotaKey{ScopeKind::kUser, 1}).at(RetentionPolicy::kCustodial) == 12);
  CHECK(agg.at(QuotaKey{ScopeKind::kGroup, 2}).at(RetentionPolicy::kCustodial) == 12);
  CHECK(agg.at(QuotaKey{ScopeKind::kUser, 1}).at(RetentionPolicy::kReplica) == 3);

  // Usage only moves on scan().
  LimitsPatch limit;
  limit.custodial = std::optional<std::int64_t>{10};
  model.set_limits(QuotaKey{ScopeKind::kUser, 1}, limit);
  CHECK(model.check_allowed(1, 2, RetentionPolicy::kCustodial));
  model.scan();
  CHECK_FALSE(model.check_allowed(1, 2, RetentionPolicy::kCustodial));
}

TEST_CASE("bench: empty run yields an empty distribution") {
  auto stats = measure_create_latency(0, BenchMode::kNoQuota);
  REQUIRE(stats.is_ok());
  CHECK(stats->samples == 0);
  CHECK(stats->p50_us == 0);
  CHECK(stats->p95_us == 0);
  CHECK(stats->p99_us == 0);
}

TEST_CASE("bench: smoke run produces ordered percentiles and no traversals") {
  auto stats = measure_create_latency(500, BenchMode::kQuota);
  REQUIRE(stats.is_ok());
  CHECK(stats->samples == 500);
  CHECK(stats->p50_us > 0);
  CHECK(stats->p50_us <= stats->p95_us);
  CHECK(stats->p95_us <= stats->p99_us);
  CHECK(stats->traversals_delta == 0);
  CHECK(stats->cache_lookups_delta == 2 * 500);
}

TEST_CASE("bench: scanner mode actually scans while creating") {
  auto stats = measure_create_latency(3000, BenchMode::kQuotaWithScanner,
                                      std::chrono::milliseconds(1));
  REQUIRE(stats.is_ok());
  CHECK(stats->samples == 3000);
  CHECK(stats->scans_completed >= 1);
  CHECK(stats->traversals_delta >= 1);
}
