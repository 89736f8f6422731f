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

#include "quotafs/service.hpp"

#include <zlib.h>

namespace quotafs {

Service::~Service() {
  if (scanner_) scanner_->stop_schedule();
}

Status Service::apply_record(const StoreRecord& record) {
  switch (record.kind) {
    case RecordKind::kNsEntry: {
      auto entry = codec::entry_from_json(record.data);
      if (!entry.is_ok()) return entry.status();
      return ns_->restore_entry(entry.value());
    }
    case RecordKind::kNsRemove: {
      auto it = record.data.find("id");
      if (it == record.data.end() || !it->is_number_unsigned()) {
        return Status(Errc::kCorruptRecord, "remove record missing id");
      }
      return ns_->restore_remove(it->get<std::uint64_t>());
    }
    case RecordKind::kLimit: {
      auto type = record.data.find("type");
      auto id = record.data.find("id");
      auto limits = record.data.find("limits");
      if (type == record.data.end() || !type->is_string() || id == record.data.end() ||
          !id->is_number_unsigned() || limits == record.data.end()) {
        return Status(Errc::kCorruptRecord, "malformed limit record");
      }
      auto kind = parse_scope_kind(type->get<std::string>());
      if (!kind.is_ok()) return Status(Errc::kCorruptRecord, kind.status().message());
      QuotaKey key{kind.value(), id->get<std::uint32_t>()};
      if (limits->is_null()) {
        engine_->restore_limits(key, std::nullopt);
      } else {
        auto parsed = codec::limits_from_json(*limits);
        if (!parsed.is_ok()) return parsed.status();
        engine_->restore_limits(key, parsed.value());
      }
      return Status::ok();
    }
    case RecordKind::kUsage: {
      auto decoded = codec::usage_from_json(record.data);
      if (!decoded.is_ok()) return decoded.status();
      engine_->restore_usage(decoded->scan_seq, std::move(decoded->usage));
      scanner_->restore_scan_seq(decoded->scan_seq);
      return Status::ok();
    }
    case RecordKind::kScanMark: {
      auto it = record.data.find("scanSeq");
      if (it == record.data.end() || !it->is_number_unsigned()) {
        return Status(Errc::kCorruptRecord, "scan mark missing scanSeq");
      }
      scanner_->restore_scan_seq(it->get<std::uint64_t>());
      return Status::ok();
    }
  }
  return Status(Errc::kCorruptRecord, "unhandled record kind");
}

Status Service::restore_from_snapshot(const codec::json& state) {
  auto entries = state.find("namespace");
  if (entries != state.end() && entries->is_array()) {
    for (const auto& j : *entries) {
      auto entry = codec::entry_from_json(j);
      if (!entry.is_ok()) return entry.status();
      Status st = ns_->restore_entry(entry.value());
      if (!st.is_ok()) return st;
    }
  }
  auto limits = state.find("limits");
  if (limits != state.end() && limits->is_array()) {
    for (const auto& j : *limits) {
      auto type = j.find("type");
      auto id = j.find("id");
      auto lim = j.find("limits");
      if (type == j.end() || id == j.end() || lim == j.end()) {
        return Status(Errc::kCorruptRecord, "malformed snapshot limit row");
      }
      auto kind = parse_scope_kind(type->get<std::string>());
      if (!kind.is_ok()) return Status(Errc::kCorruptRecord, kind.status().message());
      auto parsed = codec::limits_from_json(*lim);
      if (!parsed.is_ok()) return parsed.status();
      engine_->restore_limits(QuotaKey{kind.value(), id->get<std::uint32_t>()}, parsed.value());
    }
  }
  auto usage = state.find("usage");
  if (usage != state.end() && usage->is_object()) {
    auto decoded = codec::usage_from_json(*usage);
    if (!decoded.is_ok()) return decoded.status();
    engine_->restore_usage(decoded->scan_seq, std::move(decoded->usage));
    scanner_->restore_scan_seq(decoded->scan_seq);
  }
  auto counters = state.find("counters");
  if (counters != state.end() && counters->is_object()) {
    auto next_id = counters->value("nextId", std::uint64_t{0});
    auto create_seq = counters->value("createSeq", std::uint64_t{0});
    auto scan_seq = counters->value("scanSeq", std::uint64_t{0});
    ns_->restore_counters(next_id, create_seq);
    scanner_->restore_scan_seq(scan_seq);
  }
  return Status::ok();
}

Result<std::unique_ptr<Service>> Service::open(const ServiceOptions& options) {
  std::unique_ptr<Service> svc(new Service());

  RecoveredState recovered;
  if (!options.data_dir.empty()) {
    auto opened = Journal::open(options.data_dir, options.journal_fsync);
    if (!opened.is_ok()) return opened.status();
    svc->journal_ = std::move(opened->journal);
    recovered = std::move(opened->recovered);
  }

  svc->ns_ = std::make_unique<NamespaceTree>(svc->journal_.get());
  svc->engine_ = std::make_unique<QuotaEngine>(svc->journal_.get());
  svc->scanner_ = std::make_unique<Scanner>(*svc->ns_, *svc->engine_, svc->journal_.get());

  if (recovered.snapshot.has_value()) {
    Status st = svc->restore_from_snapshot(*recovered.snapshot);
    if (!st.is_ok()) return st;
  }
  for (const auto& record : recovered.records) {
    Status st = svc->apply_record(record);
    if (!st.is_ok()) return st;
  }
  svc->replay_truncated_ = recovered.truncated;
  svc->replay_detail_ = recovered.truncation_detail;

  svc->ns_->set_quota_checker(svc->engine_.get());

  if (options.scan_enabled) {
    Status st = svc->scanner_->start_schedule({options.scan_interval, true});
    if (!st.is_ok()) return st;
  }
  return svc;
}

codec::json Service::dump_state() const {
  codec::json state;

  codec::json entries = codec::json::array();
  for (const auto& info : ns_->dump_entries()) entries.push_back(codec::entry_to_json(info));
  state["namespace"] = std::move(entries);

  codec::json limits = codec::json::array();
  for (const auto& [key, lim] : engine_->dump_limits()) {
    codec::json row;
    row["type"] = to_string(key.kind);
    row["id"] = key.id;
    row["limits"] = codec::limits_to_json(lim);
    limits.push_back(std::move(row));
  }
  state["limits"] = std::move(limits);

  auto [scan_seq, usage] = engine_->dump_usage();
  state["usage"] = codec::usage_to_json(scan_seq, usage);

  codec::json counters;
  counters["nextId"] = ns_->next_id();
  counters["createSeq"] = ns_->create_seq();
  counters["scanSeq"] = scanner_->last_scan_seq();
  state["counters"] = std::move(counters);
  return state;
}

std::uint32_t Service::state_fingerprint() const {
  const std::string dump = dump_state().dump();
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(dump.data()), static_cast<uInt>(dump.size())));
}

Result<std::uint64_t> Service::compact() {
  if (journal_ == nullptr) {
    return Status(Errc::kInvalidArgument, "compaction requires a persistent data dir");
  }
  // Holding the commit mutex quiesces every writer, so the dump is exactly
  // the state the journal prefix encodes.
  std::lock_guard<std::mutex> commit_lk(journal_->commit_mutex());
  return journal_->compact(dump_state());
}

}  // namespace quotafs
