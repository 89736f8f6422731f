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

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "quotafs/scanner.hpp"

using namespace quotafs;
using namespace std::chrono_literals;

namespace {

const AuthContext kAlice = AuthContext::user("alice", 1000, 2000);

struct Fixture {
  NamespaceTree ns;
  QuotaEngine engine;
  Scanner scanner{ns, engine};

  Fixture() { ns.set_quota_checker(&engine); }

  void add_file(const std::string& path, std::uint32_t uid, std::uint32_t gid,
                RetentionPolicy policy, std::uint64_t size) {
    auto entry = ns.create_entry(path, uid, gid, policy, std::nullopt, kAlice);
    REQUIRE(entry.is_ok());
    REQUIRE(ns.commit_size(entry->id, size).is_ok());
  }
};

}  // namespace

TEST_CASE("scan of an empty namespace") {
  Fixture fx;
  auto report = fx.scanner.run_scan_now();
  REQUIRE(report.is_ok());
  CHECK(report->entries_scanned == 0);
  CHECK(report->usage.empty());
  CHECK(report->scan_seq == 1);
  CHECK(report->finished_at_ms >= report->started_at_ms);
}

TEST_CASE("scan aggregates by user, group, and policy") {
  Fixture fx;
  fx.add_file("/a", 1000, 2000, RetentionPolicy::kCustodial, 5);
  fx.add_file("/b", 1000, 2000, RetentionPolicy::kCustodial, 7);

  auto report = fx.scanner.run_scan_now();
  REQUIRE(report.is_ok());
  CHECK(report->entries_scanned == 2);
  CHECK(report->usage.at(QuotaKey{ScopeKind::kUser, 1000}).at(RetentionPolicy::kCustodial) ==
        12);
  CHECK(report->usage.at(QuotaKey{ScopeKind::kGroup, 2000}).at(RetentionPolicy::kCustodial) ==
        12);

  // Brute-force oracle over the fixture definition.
  CHECK(5 + 7 == 12);
  // The engine cache saw the same numbers.
  auto quota = fx.engine.get_quota(QuotaKey{ScopeKind::kUser, 1000}, kAlice);
  REQUIRE(quota.is_ok());
  CHECK(quota->usage.custodial_used == 12);
}

TEST_CASE("mixed policies land in distinct buckets") {
  Fixture fx;
  fx.add_file("/r", 1000, 2000, RetentionPolicy::kReplica, 3);
  fx.add_file("/c", 1000, 2000, RetentionPolicy::kCustodial, 5);

  auto report = fx.scanner.run_scan_now();
  REQUIRE(report.is_ok());
  const auto& user_bytes = report->usage.at(QuotaKey{ScopeKind::kUser, 1000});
  CHECK(user_bytes.at(RetentionPolicy::kReplica) == 3);
  CHECK(user_bytes.at(RetentionPolicy::kCustodial) == 5);
  CHECK(user_bytes.at(RetentionPolicy::kOutput) == 0);
}

TEST_CASE("scanning the same namespace twice is deterministic") {
  Fixture fx;
  fx.add_file("/a", 1, 1, RetentionPolicy::kReplica, 10);
  fx.add_file("/b", 2, 1, RetentionPolicy::kOutput, 20);

  auto first = fx.scanner.run_scan_now();
  REQUIRE(first.is_ok());
  auto second = fx.scanner.run_scan_now();
  REQUIRE(second.is_ok());
  CHECK(first->usage == second->usage);
  CHECK(second->scan_seq == first->scan_seq + 1);
}

TEST_CASE("a scan does not mutate the namespace") {
  Fixture fx;
  fx.add_file("/a", 1, 1, RetentionPolicy::kReplica, 10);
  const auto before = fx.ns.dump_entries();
  REQUIRE(fx.scanner.run_scan_now().is_ok());
  const auto after = fx.ns.dump_entries();
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(entry_id(before[i]) == entry_id(after[i]));
  }
  CHECK(fx.ns.entry_count() == 2);
}

TEST_CASE("concurrent run_scan_now is rejected with ScanInProgress") {
  Fixture fx;
  fx.add_file("/a", 1, 1, RetentionPolicy::kReplica, 1);

  std::mutex mu;
  std::condition_variable cv;
  bool in_scan = false;
  bool release = false;
  fx.scanner.set_scan_observer([&](const FileEntry&) {
    std::unique_lock<std::mutex> lk(mu);
    in_scan = true;
    cv.notify_all();
    cv.wait(lk, [&] { return release; });
  });

  std::thread scan_thread([&] { REQUIRE(fx.scanner.run_scan_now().is_ok()); });
  {
    std::unique_lock<std::mutex> lk(mu);
    cv.wait(lk, [&] { return in_scan; });
  }
  CHECK(fx.scanner.run_scan_now().code() == Errc::kScanInProgress);
  {
    std::lock_guard<std::mutex> lk(mu);
    release = true;
  }
  cv.notify_all();
  scan_thread.join();

  fx.scanner.set_scan_observer(nullptr);
  CHECK(fx.scanner.run_scan_now().is_ok());
}

TEST_CASE("schedule fires immediately and then periodically; stop halts it") {
  Fixture fx;
  fx.add_file("/a", 1, 1, RetentionPolicy::kReplica, 1);

  REQUIRE(fx.scanner.start_schedule({40ms, true}).is_ok());
  std::this_thread::sleep_for(350ms);
  fx.scanner.stop_schedule();

  const std::uint64_t completed = fx.scanner.scans_completed();
  CHECK(completed >= 2);
  CHECK(completed <= 12);
  CHECK(fx.scanner.last_scan_seq() == completed);
  CHECK(fx.engine.current_scan_seq() == completed);

  std::this_thread::sleep_for(100ms);
  CHECK(fx.scanner.scans_completed() == completed);
  CHECK_FALSE(fx.scanner.schedule_running());
}

TEST_CASE("zero or negative interval is InvalidArgument") {
  Fixture fx;
  CHECK(fx.scanner.start_schedule({0ms, true}).code() == Errc::kInvalidArgument);
  CHECK(fx.scanner.start_schedule({-5ms, true}).code() == Errc::kInvalidArgument);
}

TEST_CASE("disabled schedule never fires") {
  Fixture fx;
  REQUIRE(fx.scanner.start_schedule({10ms, false}).is_ok());
  std::this_thread::sleep_for(60ms);
  CHECK(fx.scanner.scans_completed() == 0);
  CHECK_FALSE(fx.scanner.schedule_running());
}

TEST_CASE("scan sequence is strictly monotonic across mixed drivers") {
  Fixture fx;
  fx.add_file("/a", 1, 1, RetentionPolicy::kReplica, 1);
  std::uint64_t prev = 0;
  for (int i = 0; i < 5; ++i) {
    auto report = fx.scanner.run_scan_now();
    REQUIRE(report.is_ok());
    CHECK(report->scan_seq > prev);
    prev = report->scan_seq;
  }
  REQUIRE(fx.scanner.start_schedule({15ms, true}).is_ok());
  std::this_thread::sleep_for(80ms);
  fx.scanner.stop_schedule();
  CHECK(fx.scanner.last_scan_seq() > prev);
  CHECK(fx.engine.current_scan_seq() == fx.scanner.last_scan_seq());
}
