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

#include <filesystem>
#include <memory>

#include "quotafs/journal.hpp"
#include "quotafs/namespace_tree.hpp"
#include "quotafs/quota_engine.hpp"
#include "quotafs/scanner.hpp"
#include "quotafs/status.hpp"

namespace quotafs {

struct ServiceOptions {
  std::filesystem::path data_dir;  // empty = ephemeral, nothing persisted
  bool journal_fsync = false;
  std::chrono::milliseconds scan_interval{60'000};
  // When enabled the schedule fires immediately on open, so a restarted
  // service rescans right away; until then it enforces from replayed usage.
  bool scan_enabled = false;
};

// Composition root: journal replay, module wiring, scheduled scanning.
class Service {
 public:
  static Result<std::unique_ptr<Service>> open(const ServiceOptions& options);
  ~Service();

  NamespaceTree& ns() { return *ns_; }
  QuotaEngine& engine() { return *engine_; }
  Scanner& scanner() { return *scanner_; }

  bool persistent() const { return journal_ != nullptr; }
  bool replay_truncated() const { return replay_truncated_; }
  const std::string& replay_detail() const { return replay_detail_; }

  // Whole-state snapshot in canonical JSON: namespace, limits, usage,
  // counters. Stable ordering; also the compaction snapshot payload.
  codec::json dump_state() const;

  // CRC32 of dump_state(); cheap state-equality probe for tests and ops.
  std::uint32_t state_fingerprint() const;

  Result<std::uint64_t> compact();

 private:
  Service() = default;
  Status restore_from_snapshot(const codec::json& state);
  Status apply_record(const StoreRecord& record);

  std::unique_ptr<Journal> journal_;
  std::unique_ptr<NamespaceTree> ns_;
  std::unique_ptr<QuotaEngine> engine_;
  std::unique_ptr<Scanner> scanner_;
  bool replay_truncated_ = false;
  std::string replay_detail_;
};

}  // namespace quotafs
