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

#include "quotafs/quota_engine.hpp"

#include <algorithm>

namespace quotafs {

QuotaEngine::QuotaEngine(Journal* journal)
    : journal_(journal),
      limits_(std::make_shared<const LimitsTable>()),
      usage_(std::make_shared<const UsageSnapshot>()) {}

std::shared_ptr<const QuotaEngine::LimitsTable> QuotaEngine::limits_snapshot() const {
  return std::atomic_load_explicit(&limits_, std::memory_order_acquire);
}

std::shared_ptr<const QuotaEngine::UsageSnapshot> QuotaEngine::usage_snapshot() const {
  return std::atomic_load_explicit(&usage_, std::memory_order_acquire);
}

QuotaUsage QuotaEngine::usage_for(const UsageSnapshot& snap, const QuotaKey& key) const {
  auto it = snap.used.find(key);
  if (it == snap.used.end()) return QuotaUsage{0, 0, 0, snap.scan_seq};
  return QuotaUsage::from_policy_bytes(it->second, snap.scan_seq);
}

Result<QuotaLimits> QuotaEngine::validated(const LimitsInput& input) {
  QuotaLimits limits;
  struct Field {
    RetentionPolicy policy;
    const std::optional<std::int64_t>* in;
  };
  const Field fields[] = {{RetentionPolicy::kReplica, &input.replica},
                          {RetentionPolicy::kCustodial, &input.custodial},
                          {RetentionPolicy::kOutput, &input.output}};
  for (const auto& field : fields) {
    if (!field.in->has_value()) continue;
    if (**field.in < 0) {
      return Status(Errc::kInvalidArgument,
                    std::string("negative limit for ") + std::string(to_string(field.policy)));
    }
    limits.for_policy(field.policy) = static_cast<std::uint64_t>(**field.in);
  }
  return limits;
}

Status QuotaEngine::journal_limits_locked(const QuotaKey& key, const QuotaLimits* limits) {
  if (journal_ == nullptr) return Status::ok();
  codec::json data;
  data["type"] = to_string(key.kind);
  data["id"] = key.id;
  data["limits"] = limits != nullptr ? codec::limits_to_json(*limits) : codec::json(nullptr);
  auto seq = journal_->append(RecordKind::kLimit, std::move(data));
  return seq.is_ok() ? Status::ok() : seq.status();
}

Result<Quota> QuotaEngine::put_quota(const QuotaKey& key, const LimitsInput& input,
                                     const AuthContext& caller) {
  if (!caller.is_admin()) {
    return Status(Errc::kForbidden, "quota limits can only be set by an admin");
  }
  auto limits = validated(input);
  if (!limits.is_ok()) return limits.status();

  std::unique_lock<std::mutex> commit_lk;
  if (journal_ != nullptr) commit_lk = std::unique_lock<std::mutex>(journal_->commit_mutex());
  std::lock_guard<std::mutex> lk(write_mu_);

  auto table = limits_snapshot();
  if (table->count(key) != 0) {
    return Status(Errc::kAlreadyExists, "quota already defined for " +
                                            std::string(to_string(key.kind)) + " " +
                                            std::to_string(key.id));
  }
  Status st = journal_limits_locked(key, &limits.value());
  if (!st.is_ok()) return st;

  auto next = std::make_shared<LimitsTable>(*table);
  (*next)[key] = limits.value();
  std::atomic_store_explicit(&limits_, std::shared_ptr<const LimitsTable>(std::move(next)),
                             std::memory_order_release);

  auto snap = usage_snapshot();
  return Quota{key, limits.take(), usage_for(*snap, key)};
}

Result<Quota> QuotaEngine::modify_quota(const QuotaKey& key, const LimitsPatch& patch,
                                        const AuthContext& caller) {
  if (!caller.is_admin()) {
    return Status(Errc::kForbidden, "quota limits can only be modified by an admin");
  }

  std::unique_lock<std::mutex> commit_lk;
  if (journal_ != nullptr) commit_lk = std::unique_lock<std::mutex>(journal_->commit_mutex());
  std::lock_guard<std::mutex> lk(write_mu_);

  auto table = limits_snapshot();
  auto it = table->find(key);
  if (it == table->end()) {
    return Status(Errc::kNotFound, "quota not found for " + std::string(to_string(key.kind)) +
                                       " " + std::to_string(key.id));
  }

  QuotaLimits merged = it->second;
  struct Field {
    RetentionPolicy policy;
    const std::optional<std::optional<std::int64_t>>* in;
  };
  const Field fields[] = {{RetentionPolicy::kReplica, &patch.replica},
                          {RetentionPolicy::kCustodial, &patch.custodial},
                          {RetentionPolicy::kOutput, &patch.output}};
  for (const auto& field : fields) {
    if (!field.in->has_value()) continue;  // field untouched
    const auto& value = **field.in;
    if (!value.has_value()) {
      merged.for_policy(field.policy).reset();  // explicit unlimited
      continue;
    }
    if (*value < 0) {
      return Status(Errc::kInvalidArgument,
                    std::string("negative limit for ") + std::string(to_string(field.policy)));
    }
    merged.for_policy(field.policy) = static_cast<std::uint64_t>(*value);
  }

  Status st = journal_limits_locked(key, &merged);
  if (!st.is_ok()) return st;

  auto next = std::make_shared<LimitsTable>(*table);
  (*next)[key] = merged;
  std::atomic_store_explicit(&limits_, std::shared_ptr<const LimitsTable>(std::move(next)),
                             std::memory_order_release);

  auto snap = usage_snapshot();
  return Quota{key, merged, usage_for(*snap, key)};
}

Result<Quota> QuotaEngine::remove_quota(const QuotaKey& key, const AuthContext& caller) {
  if (!caller.is_admin()) {
    return Status(Errc::kForbidden, "quota limits can only be removed by an admin");
  }

  std::unique_lock<std::mutex> commit_lk;
  if (journal_ != nullptr) commit_lk = std::unique_lock<std::mutex>(journal_->commit_mutex());
  std::lock_guard<std::mutex> lk(write_mu_);

  auto table = limits_snapshot();
  auto it = table->find(key);
  if (it == table->end()) {
    return Status(Errc::kNotFound, "quota not found for " + std::string(to_string(key.kind)) +
                                       " " + std::to_string(key.id));
  }
  Status st = journal_limits_locked(key, nullptr);
  if (!st.is_ok()) return st;

  QuotaLimits removed = it->second;
  auto next = std::make_shared<LimitsTable>(*table);
  next->erase(key);
  std::atomic_store_explicit(&limits_, std::shared_ptr<const LimitsTable>(std::move(next)),
                             std::memory_order_release);

  auto snap = usage_snapshot();
  return Quota{key, removed, usage_for(*snap, key)};
}

Result<Quota> QuotaEngine::get_quota(const QuotaKey& key, const AuthContext& caller) const {
  if (!caller.authenticated()) {
    return Status(Errc::kUnauthenticated, "quota lookup requires an authenticated caller");
  }
  auto table = limits_snapshot();
  auto snap = usage_snapshot();
  auto lim = table->find(key);
  bool has_limits = lim != table->end();
  bool has_usage = snap->used.count(key) != 0;
  if (!has_limits && !has_usage) {
    return Status(Errc::kNotFound, "quota not found for " +
                                       std::string(to_string(key.kind)) + " " +
                                       std::to_string(key.id));
  }
  return Quota{key, has_limits ? lim->second : QuotaLimits{}, usage_for(*snap, key)};
}

Result<std::vector<Quota>> QuotaEngine::list_quotas(ScopeKind kind,
                                                    const AuthContext& caller) const {
  if (!caller.authenticated()) {
    return Status(Errc::kUnauthenticated, "quota listing requires an authenticated caller");
  }
  auto table = limits_snapshot();
  auto snap = usage_snapshot();

  std::vector<std::uint32_t> ids;
  for (const auto& [key, limits] : *table) {
    if (key.kind == kind) ids.push_back(key.id);
  }
  for (const auto& [key, bytes] : snap->used) {
    if (key.kind == kind && table->count(key) == 0) ids.push_back(key.id);
  }
  std::sort(ids.begin(), ids.end(), decimal_string_less);
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<Quota> out;
  out.reserve(ids.size());
  for (std::uint32_t id : ids) {
    QuotaKey key{kind, id};
    auto lim = table->find(key);
    out.push_back(
        Quota{key, lim != table->end() ? lim->second : QuotaLimits{}, usage_for(*snap, key)});
  }
  return out;
}

CheckDecision QuotaEngine::check(std::uint32_t uid, std::uint32_t gid,
                                 RetentionPolicy policy) const {
  auto table = limits_snapshot();
  auto snap = usage_snapshot();

  // One cache lookup per scope kind, never a traversal. At-limit counts as
  // over: a full scope has no room to grow.
  auto over = [&](const QuotaKey& key) {
    cache_lookups_.fetch_add(1, std::memory_order_relaxed);
    auto lim = table->find(key);
    if (lim == table->end()) return false;
    const auto& limit = lim->second.for_policy(policy);
    if (!limit.has_value()) return false;
    auto used_it = snap->used.find(key);
    std::uint64_t used = used_it == snap->used.end() ? 0 : used_it->second.at(policy);
    return used >= *limit;
  };

  bool user_over = over(QuotaKey{ScopeKind::kUser, uid});
  bool group_over = over(QuotaKey{ScopeKind::kGroup, gid});
  if (user_over) {
    return CheckDecision::deny("user " + std::to_string(uid) + " at or over " +
                               std::string(to_string(policy)) + " limit");
  }
  if (group_over) {
    return CheckDecision::deny("group " + std::to_string(gid) + " at or over " +
                               std::string(to_string(policy)) + " limit");
  }
  return CheckDecision::allow();
}

Status QuotaEngine::apply_scan(const ScanReport& report) {
  std::unique_lock<std::mutex> commit_lk;
  if (journal_ != nullptr) commit_lk = std::unique_lock<std::mutex>(journal_->commit_mutex());
  std::lock_guard<std::mutex> lk(write_mu_);

  auto current = usage_snapshot();
  if (report.scan_seq <= current->scan_seq) {
    return Status(Errc::kStaleReport,
                  "scan " + std::to_string(report.scan_seq) + " is not newer than " +
                      std::to_string(current->scan_seq));
  }

  if (journal_ != nullptr) {
    auto seq = journal_->append(RecordKind::kUsage,
                                codec::usage_to_json(report.scan_seq, report.usage));
    if (!seq.is_ok()) return seq.status();
  }

  auto next = std::make_shared<UsageSnapshot>();
  next->scan_seq = report.scan_seq;
  next->used = report.usage;
  std::atomic_store_explicit(&usage_, std::shared_ptr<const UsageSnapshot>(std::move(next)),
                             std::memory_order_release);
  return Status::ok();
}

std::uint64_t QuotaEngine::current_scan_seq() const { return usage_snapshot()->scan_seq; }

void QuotaEngine::restore_limits(const QuotaKey& key, const std::optional<QuotaLimits>& limits) {
  std::lock_guard<std::mutex> lk(write_mu_);
  auto table = limits_snapshot();
  auto next = std::make_shared<LimitsTable>(*table);
  if (limits.has_value()) {
    (*next)[key] = *limits;
  } else {
    next->erase(key);
  }
  std::atomic_store_explicit(&limits_, std::shared_ptr<const LimitsTable>(std::move(next)),
                             std::memory_order_release);
}

void QuotaEngine::restore_usage(std::uint64_t scan_seq,
                                std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash> usage) {
  std::lock_guard<std::mutex> lk(write_mu_);
  auto next = std::make_shared<UsageSnapshot>();
  next->scan_seq = scan_seq;
  next->used = std::move(usage);
  std::atomic_store_explicit(&usage_, std::shared_ptr<const UsageSnapshot>(std::move(next)),
                             std::memory_order_release);
}

std::vector<std::pair<QuotaKey, QuotaLimits>> QuotaEngine::dump_limits() const {
  auto table = limits_snapshot();
  return {table->begin(), table->end()};
}

std::pair<std::uint64_t, std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash>>
QuotaEngine::dump_usage() const {
  auto snap = usage_snapshot();
  return {snap->scan_seq, snap->used};
}

}  // namespace quotafs
