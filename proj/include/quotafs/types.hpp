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

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "quotafs/status.hpp"

namespace quotafs {

// Durability class of a file; the accounting dimension for quotas.
enum class RetentionPolicy : std::uint8_t { kReplica = 0, kCustodial = 1, kOutput = 2 };

// Availability class. Carried on entries, never used as a quota key.
enum class AccessLatency : std::uint8_t { kOnline = 0, kNearline = 1 };

enum class ScopeKind : std::uint8_t { kUser = 0, kGroup = 1 };

inline constexpr std::array<RetentionPolicy, 3> kAllPolicies = {
    RetentionPolicy::kReplica, RetentionPolicy::kCustodial, RetentionPolicy::kOutput};

std::string_view to_string(RetentionPolicy policy);
std::string_view to_string(AccessLatency latency);
std::string_view to_string(ScopeKind kind);  // "user" / "group"

Result<RetentionPolicy> parse_retention_policy(std::string_view text);
Result<AccessLatency> parse_access_latency(std::string_view text);
Result<ScopeKind> parse_scope_kind(std::string_view text);

using EntryId = std::uint64_t;

inline constexpr EntryId kRootId = 1;

struct FileEntry {
  EntryId id = 0;
  EntryId parent_id = 0;
  std::string name;
  std::uint32_t uid = 0;
  std::uint32_t gid = 0;
  std::uint64_t size_bytes = 0;
  RetentionPolicy retention_policy = RetentionPolicy::kReplica;
  AccessLatency access_latency = AccessLatency::kOnline;
  std::uint64_t created_at = 0;
};

struct DirectoryEntry {
  EntryId id = 0;
  EntryId parent_id = 0;  // root is its own parent
  std::string name;
  std::uint32_t uid = 0;
  std::uint32_t gid = 0;
  RetentionPolicy default_retention_policy = RetentionPolicy::kReplica;
  AccessLatency default_access_latency = AccessLatency::kOnline;
  std::uint64_t created_at = 0;
};

using EntryInfo = std::variant<FileEntry, DirectoryEntry>;

inline bool is_file(const EntryInfo& info) { return std::holds_alternative<FileEntry>(info); }
EntryId entry_id(const EntryInfo& info);
const std::string& entry_name(const EntryInfo& info);

struct QuotaKey {
  ScopeKind kind = ScopeKind::kUser;
  std::uint32_t id = 0;

  auto operator<=>(const QuotaKey&) const = default;
};

struct QuotaKeyHash {
  std::size_t operator()(const QuotaKey& key) const {
    return std::hash<std::uint64_t>()((static_cast<std::uint64_t>(key.kind) << 32) | key.id);
  }
};

// Bytes per retention-policy class, indexed by RetentionPolicy.
struct PolicyBytes {
  std::array<std::uint64_t, 3> bytes{};

  std::uint64_t& at(RetentionPolicy policy) { return bytes[static_cast<std::size_t>(policy)]; }
  std::uint64_t at(RetentionPolicy policy) const { return bytes[static_cast<std::size_t>(policy)]; }

  bool operator==(const PolicyBytes&) const = default;
};

// An absent limit means unlimited; 0 is a valid (deny-everything) limit.
struct QuotaLimits {
  std::optional<std::uint64_t> replica_limit;
  std::optional<std::uint64_t> custodial_limit;
  std::optional<std::uint64_t> output_limit;

  std::optional<std::uint64_t>& for_policy(RetentionPolicy policy);
  const std::optional<std::uint64_t>& for_policy(RetentionPolicy policy) const;

  bool operator==(const QuotaLimits&) const = default;
};

// Limit values as supplied by callers, validated (>= 0) by the engine.
struct LimitsInput {
  std::optional<std::int64_t> replica;
  std::optional<std::int64_t> custodial;
  std::optional<std::int64_t> output;
};

// Partial update: outer optional = field supplied at all, inner = value
// or explicit unlimited.
struct LimitsPatch {
  std::optional<std::optional<std::int64_t>> replica;
  std::optional<std::optional<std::int64_t>> custodial;
  std::optional<std::optional<std::int64_t>> output;
};

struct QuotaUsage {
  std::uint64_t replica_used = 0;
  std::uint64_t custodial_used = 0;
  std::uint64_t output_used = 0;
  std::uint64_t as_of_scan = 0;

  std::uint64_t used(RetentionPolicy policy) const;

  static QuotaUsage from_policy_bytes(const PolicyBytes& bytes, std::uint64_t scan_seq);
};

struct Quota {
  QuotaKey key;
  QuotaLimits limits;
  QuotaUsage usage;
};

struct ScanReport {
  std::uint64_t scan_seq = 0;
  std::int64_t started_at_ms = 0;
  std::int64_t finished_at_ms = 0;
  std::uint64_t entries_scanned = 0;
  std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash> usage;
};

enum class Role : std::uint8_t { kAnonymous = 0, kUser = 1, kAdmin = 2 };

std::string_view to_string(Role role);
Result<Role> parse_role(std::string_view text);

struct AuthContext {
  std::string subject;
  Role role = Role::kAnonymous;
  std::optional<std::uint32_t> uid;
  std::optional<std::uint32_t> gid;

  bool authenticated() const { return role != Role::kAnonymous; }
  bool is_admin() const { return role == Role::kAdmin; }

  static AuthContext anonymous() { return AuthContext{}; }
  static AuthContext user(std::string subject, std::uint32_t uid, std::uint32_t gid) {
    return AuthContext{std::move(subject), Role::kUser, uid, gid};
  }
  static AuthContext admin(std::string subject) {
    return AuthContext{std::move(subject), Role::kAdmin, 0, 0};
  }
};

// Decimal-string comparison used for quota listings: ids render as decimal
// strings and sort lexicographically ("100" < "2" < "30").
bool decimal_string_less(std::uint32_t lhs, std::uint32_t rhs);

std::int64_t now_unix_ms();

}  // namespace quotafs
