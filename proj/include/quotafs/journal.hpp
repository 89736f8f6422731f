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
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "quotafs/json_codec.hpp"
#include "quotafs/status.hpp"

namespace quotafs {

enum class RecordKind : std::uint8_t { kLimit, kUsage, kNsEntry, kNsRemove, kScanMark };

std::string_view to_string(RecordKind kind);
Result<RecordKind> parse_record_kind(std::string_view text);

struct StoreRecord {
  std::uint64_t seq = 0;
  RecordKind kind = RecordKind::kLimit;
  codec::json data;
  std::uint64_t end_offset = 0;  // journal byte offset just past this record
};

// Everything recovered at open(): optional compaction snapshot plus the
// journal suffix. A torn or corrupt tail is detected, reported, and cut
// off so new appends land on a clean prefix.
struct RecoveredState {
  std::optional<codec::json> snapshot;
  std::uint64_t snapshot_seq = 0;
  std::vector<StoreRecord> records;
  bool truncated = false;
  std::string truncation_detail;
};

// Append-only record log under <data-dir>/journal.log with periodic
// whole-state snapshots at <data-dir>/snapshot.<seq>. Records are
// length-prefixed and CRC-checked; payloads are canonical JSON.
//
// Writers serialize through commit_mutex(): every mutating operation in
// the system holds it across "append record + apply in memory", which
// makes journal order equal apply order and gives compact() a natural
// quiesce point.
class Journal {
 public:
  struct Opened {
    std::unique_ptr<Journal> journal;
    RecoveredState recovered;
  };

  static Result<Opened> open(const std::filesystem::path& data_dir, bool fsync_appends);

  ~Journal();
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  // Durable before returning: the record is written and flushed to the OS
  // (fdatasync'd as well when fsync_appends was set). Returns the record seq.
  Result<std::uint64_t> append(RecordKind kind, codec::json data);

  // Writes snapshot.<last_seq> from the given state, truncates journal.log
  // and removes older snapshots. Caller must hold commit_mutex().
  Result<std::uint64_t> compact(const codec::json& state);

  std::uint64_t last_seq() const { return last_seq_; }
  const std::filesystem::path& data_dir() const { return dir_; }
  std::mutex& commit_mutex() { return commit_mu_; }

  // Reads raw records from a journal file, stopping at the first torn or
  // corrupt record. Exposed for fault-injection tests and debugging.
  static RecoveredState scan_journal_file(const std::filesystem::path& journal_file,
                                          std::uint64_t skip_through_seq = 0);

  static std::filesystem::path journal_path(const std::filesystem::path& data_dir);

 private:
  Journal(std::filesystem::path dir, int fd, bool fsync_appends, std::uint64_t last_seq);

  Status write_all(const void* data, std::size_t len);

  std::filesystem::path dir_;
  int fd_ = -1;
  bool fsync_appends_ = false;
  std::uint64_t last_seq_ = 0;
  std::mutex commit_mu_;
  std::mutex append_mu_;
};

}  // namespace quotafs
