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

#include <json.hpp>

#include "quotafs/status.hpp"
#include "quotafs/types.hpp"

namespace quotafs::codec {

// Canonical wire/journal form. ordered_json keeps field order stable so
// dumps, golden files and state fingerprints are byte-reproducible.
using json = nlohmann::ordered_json;

json entry_to_json(const EntryInfo& info);
Result<EntryInfo> entry_from_json(const json& j);

// {"replicaLimit":null|n,"custodialLimit":...,"outputLimit":...}
json limits_to_json(const QuotaLimits& limits);
Result<QuotaLimits> limits_from_json(const json& j);

// The REST QuotaJson shape; also reused verbatim in journal LIMIT records.
json quota_to_json(const Quota& quota);

json scan_report_to_json(const ScanReport& report);

// Journal USAGE payload: {"scanSeq":n,"entries":[...]} sorted by (type,id).
json usage_to_json(std::uint64_t scan_seq,
                   const std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash>& usage);
struct UsageDecoded {
  std::uint64_t scan_seq = 0;
  std::unordered_map<QuotaKey, PolicyBytes, QuotaKeyHash> usage;
};
Result<UsageDecoded> usage_from_json(const json& j);

}  // namespace quotafs::codec
