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

#include "quotafs/types.hpp"

#include <chrono>

namespace quotafs {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kOk: return "OK";
    case Errc::kQuotaExceeded: return "QuotaExceeded";
    case Errc::kNotFound: return "NotFound";
    case Errc::kAlreadyExists: return "AlreadyExists";
    case Errc::kUnauthenticated: return "Unauthenticated";
    case Errc::kForbidden: return "Forbidden";
    case Errc::kNotAFile: return "NotAFile";
    case Errc::kDirectoryNotEmpty: return "DirectoryNotEmpty";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kStaleReport: return "StaleReport";
    case Errc::kScanInProgress: return "ScanInProgress";
    case Errc::kCorruptRecord: return "CorruptRecord";
    case Errc::kStoreFull: return "StoreFull";
    case Errc::kIoError: return "IoError";
  }
  return "Unknown";
}

std::string Status::to_string() const {
  if (is_ok()) return "OK";
  std::string out(errc_name(code_));
  if (!message_.empty()) {
    out += ": ";
    out += message_;
  }
  return out;
}

std::string_view to_string(RetentionPolicy policy) {
  switch (policy) {
    case RetentionPolicy::kReplica: return "REPLICA";
    case RetentionPolicy::kCustodial: return "CUSTODIAL";
    case RetentionPolicy::kOutput: return "OUTPUT";
  }
  return "REPLICA";
}

std::string_view to_string(AccessLatency latency) {
  switch (latency) {
    case AccessLatency::kOnline: return "ONLINE";
    case AccessLatency::kNearline: return "NEARLINE";
  }
  return "ONLINE";
}

std::string_view to_string(ScopeKind kind) {
  return kind == ScopeKind::kUser ? "user" : "group";
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kAnonymous: return "anonymous";
    case Role::kUser: return "user";
    case Role::kAdmin: return "admin";
  }
  return "anonymous";
}

Result<RetentionPolicy> parse_retention_policy(std::string_view text) {
  if (text == "REPLICA") return RetentionPolicy::kReplica;
  if (text == "CUSTODIAL") return RetentionPolicy::kCustodial;
  if (text == "OUTPUT") return RetentionPolicy::kOutput;
  return Status(Errc::kInvalidArgument, "unknown retention policy: " + std::string(text));
}

Result<AccessLatency> parse_access_latency(std::string_view text) {
  if (text == "ONLINE") return AccessLatency::kOnline;
  if (text == "NEARLINE") return AccessLatency::kNearline;
  return Status(Errc::kInvalidArgument, "unknown access latency: " + std::string(text));
}

Result<ScopeKind> parse_scope_kind(std::string_view text) {
  if (text == "user") return ScopeKind::kUser;
  if (text == "group") return ScopeKind::kGroup;
  return Status(Errc::kInvalidArgument, "unknown scope kind: " + std::string(text));
}

Result<Role> parse_role(std::string_view text) {
  if (text == "anonymous") return Role::kAnonymous;
  if (text == "user") return Role::kUser;
  if (text == "admin") return Role::kAdmin;
  return Status(Errc::kInvalidArgument, "unknown role: " + std::string(text));
}

EntryId entry_id(const EntryInfo& info) {
  return is_file(info) ? std::get<FileEntry>(info).id : std::get<DirectoryEntry>(info).id;
}

const std::string& entry_name(const EntryInfo& info) {
  return is_file(info) ? std::get<FileEntry>(info).name : std::get<DirectoryEntry>(info).name;
}

std::optional<std::uint64_t>& QuotaLimits::for_policy(RetentionPolicy policy) {
  switch (policy) {
    case RetentionPolicy::kReplica: return replica_limit;
    case RetentionPolicy::kCustodial: return custodial_limit;
    case RetentionPolicy::kOutput: return output_limit;
  }
  return replica_limit;
}

const std::optional<std::uint64_t>& QuotaLimits::for_policy(RetentionPolicy policy) const {
  return const_cast<QuotaLimits*>(this)->for_policy(policy);
}

std::uint64_t QuotaUsage::used(RetentionPolicy policy) const {
  switch (policy) {
    case RetentionPolicy::kReplica: return replica_used;
    case RetentionPolicy::kCustodial: return custodial_used;
    case RetentionPolicy::kOutput: return output_used;
  }
  return 0;
}

QuotaUsage QuotaUsage::from_policy_bytes(const PolicyBytes& bytes, std::uint64_t scan_seq) {
  QuotaUsage usage;
  usage.replica_used = bytes.at(RetentionPolicy::kReplica);
  usage.custodial_used = bytes.at(RetentionPolicy::kCustodial);
  usage.output_used = bytes.at(RetentionPolicy::kOutput);
  usage.as_of_scan = scan_seq;
  return usage;
}

bool decimal_string_less(std::uint32_t lhs, std::uint32_t rhs) {
  return std::to_string(lhs) < std::to_string(rhs);
}

std::int64_t now_unix_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace quotafs
