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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "quotafs/status.hpp"
#include "quotafs/types.hpp"

namespace quotafs {

struct TokenEntry {
  Role role = Role::kUser;
  std::uint32_t uid = 0;
  std::uint32_t gid = 0;
};

// key=value configuration:
//   port=3880
//   data-dir=/var/lib/quotafs
//   scan.interval=60s          (plain integer = seconds; ms/s/m suffixes)
//   scan.enabled=true
//   journal.fsync=false
//   token.<name>=<role>:<uid>:<gid>
struct Config {
  std::uint16_t port = 3880;
  std::filesystem::path data_dir;  // empty = no persistence
  std::chrono::milliseconds scan_interval{60'000};
  bool scan_enabled = true;
  bool journal_fsync = false;
  std::map<std::string, TokenEntry> tokens;  // bearer token -> identity

  static Result<Config> parse(std::string_view text);
  static Result<Config> load(const std::filesystem::path& file);

  AuthContext resolve_token(std::string_view token) const;
};

Result<std::chrono::milliseconds> parse_duration(std::string_view text);

// 1048576 -> "1.0MiB", 512 -> "512B". Powers of 1024, one decimal.
std::string format_human_size(std::uint64_t bytes);

}  // namespace quotafs
