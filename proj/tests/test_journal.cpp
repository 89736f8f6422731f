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

#include <filesystem>
#include <fstream>
#include <random>

#include "quotafs/journal.hpp"
#include "quotafs/service.hpp"

using namespace quotafs;
namespace fs = std::filesystem;

namespace {

const AuthContext kAdmin = AuthContext::admin("root");
const AuthContext kAlice = AuthContext::user("alice", 1000, 2000);

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("quotafs-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

ServiceOptions options_for(const TempDir& dir) {
  ServiceOptions opts;
  opts.data_dir = dir.path;
  return opts;
}

}  // namespace

TEST_CASE("append and reopen round-trips records in order") {
  TempDir dir;
  {
    auto opened = Journal::open(dir.path, false);
    REQUIRE(opened.is_ok());
    auto& journal = *opened->journal;
    CHECK(opened->recovered.records.empty());
    for (int i = 1; i <= 5; ++i) {
      codec::json data;
      data["i"] = i;
      auto seq = journal.append(RecordKind::kScanMark, data);
      REQUIRE(seq.is_ok());
      CHECK(seq.value() == static_cast<std::uint64_t>(i));
    }
  }
  auto reopened = Journal::open(dir.path, false);
  REQUIRE(reopened.is_ok());
  REQUIRE(reopened->recovered.records.size() == 5);
  for (int i = 0; i < 5; ++i) {
    const auto& rec = reopened->recovered.records[i];
    CHECK(rec.seq == static_cast<std::uint64_t>(i + 1));
    CHECK(rec.kind == RecordKind::kScanMark);
    CHECK(rec.data["i"] == i + 1);
  }
  CHECK_FALSE(reopened->recovered.truncated);
  CHECK(reopened->journal->last_seq() == 5);
}

TEST_CASE("limits written before a restart are enforced after it") {
  TempDir dir;
  {
    auto svc = Service::open(options_for(dir));
    REQUIRE(svc.is_ok());
    LimitsInput input;
    input.custodial = 10'000;
    REQUIRE(svc.value()
                ->engine()
                .put_quota(QuotaKey{ScopeKind::kUser, 1000}, input, kAdmin)
                .is_ok());
  }
  auto svc = Service::open(options_for(dir));
  REQUIRE(svc.is_ok());
  auto quota = svc.value()->engine().get_quota(QuotaKey{ScopeKind::kUser, 1000}, kAlice);
  REQUIRE(quota.is_ok());
  CHECK(quota->limits.custodial_limit == 10'000);
}

TEST_CASE("replay of an empty store yields an empty service") {
  TempDir dir;
  auto svc = Service::open(options_for(dir));
  REQUIRE(svc.is_ok());
  CHECK(svc.value()->ns().file_count() == 0);
  CHECK(svc.value()->engine().list_quotas(ScopeKind::kUser, kAlice)->empty());
  CHECK(svc.value()->engine().current_scan_seq() == 0);
}

TEST_CASE("namespace and usage survive a restart") {
  TempDir dir;
  std::uint32_t fingerprint = 0;
  {
    auto svc = Service::open(options_for(dir));
    REQUIRE(svc.is_ok());
    auto& s = *svc.value();
    REQUIRE(s.ns().make_directory("/d", 0, 0, RetentionPolicy::kCustodial, std::nullopt, kAdmin)
                .is_ok());
    auto f = s.ns().create_entry("/d/f", 1000, 2000, std::nullopt, std::nullopt, kAlice);
    REQUIRE(f.is_ok());
    REQUIRE(s.ns().commit_size(f->id, 777).is_ok());
    REQUIRE(s.scanner().run_scan_now().is_ok());
    REQUIRE(s.ns().create_entry("/d/g", 1000, 2000, std::nullopt, std::nullopt, kAlice).is_ok());
    REQUIRE(s.ns().remove_entry("/d/g", kAlice).is_ok());
    fingerprint = s.state_fingerprint();
  }
  auto svc = Service::open(options_for(dir));
  REQUIRE(svc.is_ok());
  auto& s = *svc.value();
  CHECK(s.state_fingerprint() == fingerprint);
  auto info = s.ns().stat("/d/f");
  REQUIRE(info.is_ok());
  const auto& file = std::get<FileEntry>(info.value());
  CHECK(file.size_bytes == 777);
  CHECK(file.retention_policy == RetentionPolicy::kCustodial);
  auto usage = s.engine().get_quota(QuotaKey{ScopeKind::kUser, 1000}, kAlice);
  REQUIRE(usage.is_ok());
  CHECK(usage->usage.custodial_used == 777);
  // Scan numbering continues, never restarts.
  auto report = s.scanner().run_scan_now();
  REQUIRE(report.is_ok());
  CHECK(report->scan_seq == 2);
}

TEST_CASE("a torn tail is detected, reported, and cut off") {
  TempDir dir;
  std::uint32_t fingerprint_two_files = 0;
  {
    auto svc = Service::open(options_for(dir));
    REQUIRE(svc.is_ok());
    auto& s = *svc.value();
    REQUIRE(s.ns().create_entry("/a", 1, 1, std::nullopt, std::nullopt, kAlice).is_ok());
    REQUIRE(s.ns().create_entry("/b", 1, 1, std::nullopt, std::nullopt, kAlice).is_ok());
    fingerprint_two_files = s.state_fingerprint();
    REQUIRE(s.ns().create_entry("/c", 1, 1, std::nullopt, std::nullopt, kAlice).is_ok());
  }
  const auto jpath = Journal::journal_path(dir.path);
  const auto full_size = fs::file_size(jpath);
  fs::resize_file(jpath, full_size - 3);  // tear the last record

  {
    auto svc = Service::open(options_for(dir));
    REQUIRE(svc.is_ok());
    CHECK(svc.value()->replay_truncated());
    CHECK(svc.value()->ns().file_count() == 2);
    CHECK(svc.value()->state_fingerprint() == fingerprint_two_files);

    // The torn bytes are gone: appends after recovery replay cleanly.
    REQUIRE(
        svc.value()->ns().create_entry("/d", 1, 1, std::nullopt, std::nullopt, kAlice).is_ok());
  }
  auto again = Service::open(options_for(dir));
  REQUIRE(again.is_ok());
  CHECK_FALSE(again.value()->replay_truncated());
  CHECK(again.value()->ns().file_count() == 3);
}

TEST_CASE("a corrupted byte stops replay at the last valid record") {
  TempDir dir;
  {
    auto opened = Journal::open(dir.path, false);
    REQUIRE(opened.is_ok());
    for (int i = 0; i < 3; ++i) {
      codec::json data;
      data["i"] = i;
      REQUIRE(opened->journal->append(RecordKind::kScanMark, data).is_ok());
    }
  }
  const auto jpath = Journal::journal_path(dir.path);
  // Flip one payload byte in the middle record.
  std::fstream f(jpath, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(0, std::ios::end);
  auto size = static_cast<std::size_t>(f.tellg());
  f.seekp(static_cast<std::streamoff>(size / 2));
  f.put('\xff');
  f.close();

  auto scanned = Journal::scan_journal_file(jpath);
  CHECK(scanned.truncated);
  CHECK(scanned.records.size() < 3);
  CHECK(scanned.truncation_detail.find("checksum") != std::string::npos);
}

TEST_CASE("compaction preserves replay equivalence and snapshots replace the prefix") {
  TempDir dir;
  codec::json dump_before;
  {
    auto svc = Service::open(options_for(dir));
    REQUIRE(svc.is_ok());
    auto& s = *svc.value();
    LimitsInput input;
    input.replica = 4096;
    REQUIRE(s.engine().put_quota(QuotaKey{ScopeKind::kGroup, 5}, input, kAdmin).is_ok());
    REQUIRE(s.ns().create_entry("/keep", 1, 5, std::nullopt, std::nullopt, kAlice).is_ok());
    REQUIRE(s.scanner().run_scan_now().is_ok());
    dump_before = s.dump_state();

    auto compacted = s.compact();
    REQUIRE(compacted.is_ok());
    CHECK(fs::file_size(Journal::journal_path(dir.path)) == 0);
    bool have_snapshot = false;
    for (const auto& ent : fs::directory_iterator(dir.path)) {
      if (ent.path().filename().string().rfind("snapshot.", 0) == 0) have_snapshot = true;
    }
    CHECK(have_snapshot);
  }
  {
    auto svc = Service::open(options_for(dir));
    REQUIRE(svc.is_ok());
    CHECK(svc.value()->dump_state() == dump_before);

    // New work after compaction lands in the fresh journal suffix.
    REQUIRE(svc.value()
                ->ns()
                .create_entry("/later", 1, 5, std::nullopt, std::nullopt, kAlice)
                .is_ok());
  }
  auto svc = Service::open(options_for(dir));
  REQUIRE(svc.is_ok());
  CHECK(svc.value()->ns().stat("/keep").is_ok());
  CHECK(svc.value()->ns().stat("/later").is_ok());
}

TEST_CASE("compacted state equals journal-only replay state") {
  TempDir plain_dir;
  TempDir compact_dir;
  auto drive = [](Service& s) {
    LimitsInput input;
    input.custodial = 1000;
    REQUIRE(s.engine().put_quota(QuotaKey{ScopeKind::kUser, 9}, input, kAdmin).is_ok());
    auto f = s.ns().create_entry("/x", 9, 9, RetentionPolicy::kCustodial, std::nullopt, kAlice);
    REQUIRE(f.is_ok());
    REQUIRE(s.ns().commit_size(f->id, 123).is_ok());
    REQUIRE(s.scanner().run_scan_now().is_ok());
  };
  {
    auto svc = Service::open(options_for(plain_dir));
    REQUIRE(svc.is_ok());
    drive(*svc.value());
  }
  {
    auto svc = Service::open(options_for(compact_dir));
    REQUIRE(svc.is_ok());
    drive(*svc.value());
    REQUIRE(svc.value()->compact().is_ok());
  }
  auto plain = Service::open(options_for(plain_dir));
  auto compacted = Service::open(options_for(compact_dir));
  REQUIRE(plain.is_ok());
  REQUIRE(compacted.is_ok());
  CHECK(plain.value()->dump_state() == compacted.value()->dump_state());
  CHECK(plain.value()->state_fingerprint() == compacted.value()->state_fingerprint());
}

TEST_CASE("ephemeral service refuses to compact") {
  auto svc = Service::open(ServiceOptions{});
  REQUIRE(svc.is_ok());
  CHECK(svc.value()->compact().code() == Errc::kInvalidArgument);
}

TEST_CASE("fsync mode appends still round-trip") {
  TempDir dir;
  ServiceOptions opts = options_for(dir);
  opts.journal_fsync = true;
  {
    auto svc = Service::open(opts);
    REQUIRE(svc.is_ok());
    REQUIRE(svc.value()->ns().create_entry("/f", 1, 1, std::nullopt, std::nullopt, kAlice).is_ok());
  }
  auto svc = Service::open(opts);
  REQUIRE(svc.is_ok());
  CHECK(svc.value()->ns().stat("/f").is_ok());
}

TEST_CASE("property: entry JSON encode/decode is the identity") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    EntryInfo info;
    if (rng() % 2 == 0) {
      FileEntry f;
      f.id = rng();
      f.parent_id = rng();
      f.name = "n" + std::to_string(rng() % 1000);
      f.uid = static_cast<std::uint32_t>(rng());
      f.gid = static_cast<std::uint32_t>(rng());
      f.size_bytes = rng();
      f.retention_policy = kAllPolicies[rng() % 3];
      f.access_latency = rng() % 2 == 0 ? AccessLatency::kOnline : AccessLatency::kNearline;
      f.created_at = rng();
      info = f;
    } else {
      DirectoryEntry d;
      d.id = rng();
      d.parent_id = rng();
      d.name = "d" + std::to_string(rng() % 1000);
      d.uid = static_cast<std::uint32_t>(rng());
      d.gid = static_cast<std::uint32_t>(rng());
      d.default_retention_policy = kAllPolicies[rng() % 3];
      d.default_access_latency =
          rng() % 2 == 0 ? AccessLatency::kOnline : AccessLatency::kNearline;
      d.created_at = rng();
      info = d;
    }
    auto decoded = codec::entry_from_json(codec::entry_to_json(info));
    REQUIRE(decoded.is_ok());
    CHECK(codec::entry_to_json(decoded.value()) == codec::entry_to_json(info));
  }
}

TEST_CASE("property: limits and usage JSON round-trip") {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 200; ++i) {
    QuotaLimits limits;
    auto roll = [&rng]() -> std::optional<std::uint64_t> {
      if (rng() % 2 == 0) return std::nullopt;
      return rng() % 1'000'000;
    };
    limits.replica_limit = roll();
    limits.custodial_limit = roll();
    limits.output_limit = roll();
    auto decoded = codec::limits_from_json(codec::limits_to_json(limits));
    REQUIRE(decoded.is_ok());
    CHECK(decoded.value() == limits);

    std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash> usage;
    for (int k = 0; k < 5; ++k) {
      PolicyBytes bytes;
      for (auto policy : kAllPolicies) bytes.at(policy) = rng() % 1'000'000;
      usage[QuotaKey{rng() % 2 == 0 ? ScopeKind::kUser : ScopeKind::kGroup,
                     static_cast<std::uint32_t>(rng() % 50)}] = bytes;
    }
    auto usage_decoded = codec::usage_from_json(codec::usage_to_json(i, usage));
    REQUIRE(usage_decoded.is_ok());
    CHECK(usage_decoded->scan_seq == static_cast<std::uint64_t>(i));
    CHECK(usage_decoded->usage == usage);
  }
}
