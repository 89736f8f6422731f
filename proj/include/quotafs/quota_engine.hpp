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
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "quotafs/journal.hpp"
#include "quotafs/quota_check.hpp"
#include "quotafs/status.hpp"
#include "quotafs/types.hpp"

namespace quotafs {

// Owns quota limits and the in-memory usage cache.
//
// Usage is only ever replaced wholesale by apply_scan(): a scan produces an
// immutable snapshot and the engine swaps one shared pointer. Limits follow
// the same copy-on-write discipline. check() therefore never takes a lock
// and always sees one internally consistent generation; between scans its
// answers deliberately lag the true namespace contents.
class QuotaEngine : public QuotaChecker {
 public:
  explicit QuotaEngine(Journal* journal = nullptr);

  Result<Quota> put_quota(const QuotaKey& key, const LimitsInput& limits,
                          const AuthContext& caller);
  Result<Quota> modify_quota(const QuotaKey& key, const LimitsPatch& patch,
                             const AuthContext& caller);
  Result<Quota> remove_quota(const QuotaKey& key, const AuthContext& caller);

  // A quota is "known" when it has configured limits or scanned usage.
  Result<Quota> get_quota(const QuotaKey& key, const AuthContext& caller) const;

  // All known quotas of one kind, sorted lexicographically by the decimal
  // string form of the id.
  Result<std::vector<Quota>> list_quotas(ScopeKind kind, const AuthContext& caller) const;

  // Allow unless the user scope or the group scope is at or past its limit
  // for this policy class. Total function; absent quotas mean unlimited.
  CheckDecision check(std::uint32_t uid, std::uint32_t gid,
                      RetentionPolicy policy) const override;

  // Replaces the whole usage cache with the report's aggregation. Rejects
  // reports that do not advance the scan sequence.
  Status apply_scan(const ScanReport& report);

  std::uint64_t current_scan_seq() const;

  // Count of per-scope cache lookups performed by check().
  std::uint64_t cache_lookups() const { return cache_lookups_.load(std::memory_order_relaxed); }

  // Replay hooks: no auth, no journaling.
  void restore_limits(const QuotaKey& key, const std::optional<QuotaLimits>& limits);
  void restore_usage(std::uint64_t scan_seq,
                     std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash> usage);

  std::vector<std::pair<QuotaKey, QuotaLimits>> dump_limits() const;
  std::pair<std::uint64_t, std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash>> dump_usage()
      const;

 private:
  using LimitsTable = std::map<QuotaKey, QuotaLimits>;
  struct UsageSnapshot {
    std::uint64_t scan_seq = 0;
    std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash> used;
  };

  std::shared_ptr<const LimitsTable> limits_snapshot() const;
  std::shared_ptr<const UsageSnapshot> usage_snapshot() const;

  QuotaUsage usage_for(const UsageSnapshot& snap, const QuotaKey& key) const;
  Status journal_limits_locked(const QuotaKey& key, const QuotaLimits* limits);
  static Result<QuotaLimits> validated(const LimitsInput& limits);

  Journal* journal_ = nullptr;
  mutable std::mutex write_mu_;  // serializes limit mutations and scan intake
  std::shared_ptr<const LimitsTable> limits_;
  std::shared_ptr<const UsageSnapshot> usage_;
  mutable std::atomic<std::uint64_t> cache_lookups_{0};
};

}  // namespace quotafs
