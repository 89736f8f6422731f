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

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "quotafs/journal.hpp"
#include "quotafs/quota_check.hpp"
#include "quotafs/status.hpp"
#include "quotafs/types.hpp"

namespace quotafs {

// Single-rooted tree of directories and file entries. Creates consult the
// quota checker before inserting; sizes are committed after the fact and
// only ever reach quota usage through a scan.
//
// Mutations are linearized under an exclusive lock (plus the journal commit
// mutex when persistence is attached). iterate_entries() walks the id-ordered
// entry map in short locked chunks so a scan never stalls writers for more
// than one chunk.
class NamespaceTree {
 public:
  explicit NamespaceTree(Journal* journal = nullptr);

  void set_quota_checker(const QuotaChecker* checker) { checker_ = checker; }

  Result<FileEntry> create_entry(std::string_view path, std::uint32_t uid, std::uint32_t gid,
                                 std::optional<RetentionPolicy> retention_policy,
                                 std::optional<AccessLatency> access_latency,
                                 const AuthContext& caller);

  Result<DirectoryEntry> make_directory(std::string_view path, std::uint32_t uid,
                                        std::uint32_t gid,
                                        std::optional<RetentionPolicy> default_policy,
                                        std::optional<AccessLatency> default_latency,
                                        const AuthContext& caller);

  Result<FileEntry> commit_size(EntryId id, std::uint64_t size_bytes);

  Result<EntryInfo> remove_entry(std::string_view path, const AuthContext& caller);

  Result<EntryInfo> stat(std::string_view path) const;

  // Children of a directory, sorted by name.
  Result<std::vector<EntryInfo>> list(std::string_view path) const;

  // Visits every file entry at most once, in id order. Entries created after
  // iteration begins may or may not be seen; none is seen twice.
  void iterate_entries(const std::function<void(const FileEntry&)>& fn) const;

  std::uint64_t file_count() const;
  std::uint64_t entry_count() const;  // includes directories and the root

  // Number of namespace-wide traversals performed (iterate_entries calls).
  std::uint64_t full_traversals() const { return full_traversals_.load(std::memory_order_relaxed); }

  // Replay hooks: apply journal/snapshot records verbatim, no checks, no
  // journaling. Parents always precede children (ids are monotonic).
  Status restore_entry(const EntryInfo& info);
  Status restore_remove(EntryId id);
  void restore_counters(EntryId next_id, std::uint64_t create_seq);

  // All entries except the implicit root, sorted by id.
  std::vector<EntryInfo> dump_entries() const;
  EntryId next_id() const;
  std::uint64_t create_seq() const;

 private:
  struct Node {
    bool is_dir = false;
    EntryId id = 0;
    EntryId parent_id = 0;
    std::string name;
    std::uint32_t uid = 0;
    std::uint32_t gid = 0;
    std::uint64_t created_at = 0;
    // file
    std::uint64_t size_bytes = 0;
    RetentionPolicy policy = RetentionPolicy::kReplica;
    AccessLatency latency = AccessLatency::kOnline;
    // dir
    RetentionPolicy default_policy = RetentionPolicy::kReplica;
    AccessLatency default_latency = AccessLatency::kOnline;
    std::map<std::string, EntryId> children;
  };

  static Result<std::vector<std::string>> split_path(std::string_view path);
  static EntryInfo to_info(const Node& node);
  static Node from_info(const EntryInfo& info);

  // Walks to the node at path. Requires mu_ held.
  const Node* resolve_locked(const std::vector<std::string>& components) const;
  const Node* resolve_parent_locked(const std::vector<std::string>& components) const;

  Status journal_entry_locked(const Node& node);

  Journal* journal_ = nullptr;
  const QuotaChecker* checker_ = nullptr;

  mutable std::shared_mutex mu_;
  std::map<EntryId, Node> nodes_;
  EntryId next_id_ = kRootId + 1;
  std::uint64_t create_seq_ = 0;
  mutable std::atomic<std::uint64_t> full_traversals_{0};
};

}  // namespace quotafs
