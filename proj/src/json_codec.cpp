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

#include "quotafs/json_codec.hpp"

#include <algorithm>
#include <vector>

namespace quotafs::codec {

namespace {

Result<std::uint64_t> get_u64(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number_unsigned()) {
    return Status(Errc::kCorruptRecord, std::string("missing or invalid field: ") + field);
  }
  return it->get<std::uint64_t>();
}

Result<std::uint32_t> get_u32(const json& j, const char* field) {
  auto v = get_u64(j, field);
  if (!v.is_ok()) return v.status();
  if (v.value() > 0xffffffffull) {
    return Status(Errc::kCorruptRecord, std::string("field out of range: ") + field);
  }
  return static_cast<std::uint32_t>(v.value());
}

Result<std::string> get_str(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    return Status(Errc::kCorruptRecord, std::string("missing or invalid field: ") + field);
  }
  return it->get<std::string>();
}

json optional_limit(const std::optional<std::uint64_t>& limit) {
  if (limit) return *limit;
  return nullptr;
}

}  // namespace

json entry_to_json(const EntryInfo& info) {
  json j;
  if (is_file(info)) {
    const auto& f = std::get<FileEntry>(info);
    j["kind"] = "file";
    j["id"] = f.id;
    j["parentId"] = f.parent_id;
    j["name"] = f.name;
    j["uid"] = f.uid;
    j["gid"] = f.gid;
    j["sizeBytes"] = f.size_bytes;
    j["retentionPolicy"] = to_string(f.retention_policy);
    j["accessLatency"] = to_string(f.access_latency);
    j["createdAt"] = f.created_at;
  } else {
    const auto& d = std::get<DirectoryEntry>(info);
    j["kind"] = "dir";
    j["id"] = d.id;
    j["parentId"] = d.parent_id;
    j["name"] = d.name;
    j["uid"] = d.uid;
    j["gid"] = d.gid;
    j["defaultRetentionPolicy"] = to_string(d.default_retention_policy);
    j["defaultAccessLatency"] = to_string(d.default_access_latency);
    j["createdAt"] = d.created_at;
  }
  return j;
}

Result<EntryInfo> entry_from_json(const json& j) {
  auto kind = get_str(j, "kind");
  if (!kind.is_ok()) return kind.status();
  auto id = get_u64(j, "id");
  auto parent = get_u64(j, "parentId");
  auto name = get_str(j, "name");
  auto uid = get_u32(j, "uid");
  auto gid = get_u32(j, "gid");
  auto created = get_u64(j, "createdAt");
  for (const Status* st : {&id.status(), &parent.status(), &name.status(), &uid.status(),
                           &gid.status(), &created.status()}) {
    if (!st->is_ok()) return *st;
  }

  if (kind.value() == "file") {
    auto size = get_u64(j, "sizeBytes");
    if (!size.is_ok()) return size.status();
    auto policy_str = get_str(j, "retentionPolicy");
    if (!policy_str.is_ok()) return policy_str.status();
    auto latency_str = get_str(j, "accessLatency");
    if (!latency_str.is_ok()) return latency_str.status();
    auto policy = parse_retention_policy(policy_str.value());
    if (!policy.is_ok()) return Status(Errc::kCorruptRecord, policy.status().message());
    auto latency = parse_access_latency(latency_str.value());
    if (!latency.is_ok()) return Status(Errc::kCorruptRecord, latency.status().message());

    FileEntry f;
    f.id = id.value();
    f.parent_id = parent.value();
    f.name = name.take();
    f.uid = uid.value();
    f.gid = gid.value();
    f.size_bytes = size.value();
    f.retention_policy = policy.value();
    f.access_latency = latency.value();
    f.created_at = created.value();
    return EntryInfo(std::move(f));
  }
  if (kind.value() == "dir") {
    auto policy_str = get_str(j, "defaultRetentionPolicy");
    if (!policy_str.is_ok()) return policy_str.status();
    auto latency_str = get_str(j, "defaultAccessLatency");
    if (!latency_str.is_ok()) return latency_str.status();
    auto policy = parse_retention_policy(policy_str.value());
    if (!policy.is_ok()) return Status(Errc::kCorruptRecord, policy.status().message());
    auto latency = parse_access_latency(latency_str.value());
    if (!latency.is_ok()) return Status(Errc::kCorruptRecord, latency.status().message());

    DirectoryEntry d;
    d.id = id.value();
    d.parent_id = parent.value();
    d.name = name.take();
    d.uid = uid.value();
    d.gid = gid.value();
    d.default_retention_policy = policy.value();
    d.default_access_latency = latency.value();
    d.created_at = created.value();
    return EntryInfo(std::move(d));
  }
  return Status(Errc::kCorruptRecord, "unknown entry kind: " + kind.value());
}

json limits_to_json(const QuotaLimits& limits) {
  json j;
  j["custodialLimit"] = optional_limit(limits.custodial_limit);
  j["replicaLimit"] = optional_limit(limits.replica_limit);
  j["outputLimit"] = optional_limit(limits.output_limit);
  return j;
}

Result<QuotaLimits> limits_from_json(const json& j) {
  QuotaLimits limits;
  struct Field {
    const char* name;
    std::optional<std::uint64_t>* slot;
  };
  Field fields[] = {{"custodialLimit", &limits.custodial_limit},
                    {"replicaLimit", &limits.replica_limit},
                    {"outputLimit", &limits.output_limit}};
  for (const auto& field : fields) {
    auto it = j.find(field.name);
    if (it == j.end() || it->is_null()) continue;
    if (!it->is_number_unsigned()) {
      return Status(Errc::kCorruptRecord, std::string("invalid limit field: ") + field.name);
    }
    *field.slot = it->get<std::uint64_t>();
  }
  return limits;
}

json quota_to_json(const Quota& quota) {
  json j;
  j["id"] = quota.key.id;
  j["type"] = to_string(quota.key.kind);
  j["custodialLimit"] = optional_limit(quota.limits.custodial_limit);
  j["replicaLimit"] = optional_limit(quota.limits.replica_limit);
  j["outputLimit"] = optional_limit(quota.limits.output_limit);
  j["custodialSpaceUsed"] = quota.usage.custodial_used;
  j["replicaSpaceUsed"] = quota.usage.replica_used;
  j["outputSpaceUsed"] = quota.usage.output_used;
  j["asOfScan"] = quota.usage.as_of_scan;
  return j;
}

namespace {

std::vector<std::pair<QuotaKey, PolicyBytes>> sorted_usage(
    const std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash>& usage) {
  std::vector<std::pair<QuotaKey, PolicyBytes>> rows(usage.begin(), usage.end());
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return rows;
}

json usage_rows_to_json(const std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash>& usage) {
  json rows = json::array();
  for (const auto& [key, bytes] : sorted_usage(usage)) {
    json row;
    row["type"] = to_string(key.kind);
    row["id"] = key.id;
    row["replicaBytes"] = bytes.at(RetentionPolicy::kReplica);
    row["custodialBytes"] = bytes.at(RetentionPolicy::kCustodial);
    row["outputBytes"] = bytes.at(RetentionPolicy::kOutput);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json scan_report_to_json(const ScanReport& report) {
  json j;
  j["scanSeq"] = report.scan_seq;
  j["entriesScanned"] = report.entries_scanned;
  j["startedAtMs"] = report.started_at_ms;
  j["finishedAtMs"] = report.finished_at_ms;
  j["usage"] = usage_rows_to_json(report.usage);
  return j;
}

json usage_to_json(std::uint64_t scan_seq,
                   const std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash>& usage) {
  json j;
  j["scanSeq"] = scan_seq;
  j["entries"] = usage_rows_to_json(usage);
  return j;
}

Result<UsageDecoded> usage_from_json(const json& j) {
  UsageDecoded out;
  auto seq = get_u64(j, "scanSeq");
  if (!seq.is_ok()) return seq.status();
  out.scan_seq = seq.value();
  auto entries = j.find("entries");
  if (entries == j.end() || !entries->is_array()) {
    return Status(Errc::kCorruptRecord, "usage record missing entries");
  }
  for (const auto& row : *entries) {
    auto type = get_str(row, "type");
    if (!type.is_ok()) return type.status();
    auto kind = parse_scope_kind(type.value());
    if (!kind.is_ok()) return Status(Errc::kCorruptRecord, kind.status().message());
    auto id = get_u32(row, "id");
    if (!id.is_ok()) return id.status();
    auto replica = get_u64(row, "replicaBytes");
    auto custodial = get_u64(row, "custodialBytes");
    auto output = get_u64(row, "outputBytes");
    for (const Status* st : {&replica.status(), &custodial.status(), &output.status()}) {
      if (!st->is_ok()) return *st;
    }
    PolicyBytes bytes;
    bytes.at(RetentionPolicy::kReplica) = replica.value();
    bytes.at(RetentionPolicy::kCustodial) = custodial.value();
    bytes.at(RetentionPolicy::kOutput) = output.value();
    out.usage[QuotaKey{kind.value(), id.value()}] = bytes;
  }
  return out;
}

}  // namespace quotafs::codec
