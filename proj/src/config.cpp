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

#include "quotafs/config.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace quotafs {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

Result<std::uint64_t> parse_unsigned(std::string_view text, std::uint64_t max) {
  if (text.empty()) return Status(Errc::kInvalidArgument, "empty number");
  std::uint64_t value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      return Status(Errc::kInvalidArgument, "not a number: " + std::string(text));
    }
    if (value > (max - (c - '0')) / 10) {
      return Status(Errc::kInvalidArgument, "number out of range: " + std::string(text));
    }
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return value;
}

Result<bool> parse_bool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  return Status(Errc::kInvalidArgument, "not a boolean: " + std::string(text));
}

}  // namespace

Result<std::chrono::milliseconds> parse_duration(std::string_view text) {
  std::uint64_t multiplier_ms = 1000;  // bare numbers are seconds
  if (text.size() > 2 && text.substr(text.size() - 2) == "ms") {
    multiplier_ms = 1;
    text.remove_suffix(2);
  } else if (!text.empty() && text.back() == 's') {
    text.remove_suffix(1);
  } else if (!text.empty() && text.back() == 'm') {
    multiplier_ms = 60'000;
    text.remove_suffix(1);
  }
  auto value = parse_unsigned(text, std::numeric_limits<std::uint64_t>::max() / 60'000);
  if (!value.is_ok()) return value.status();
  return std::chrono::milliseconds(value.value() * multiplier_ms);
}

Result<Config> Config::parse(std::string_view text) {
  Config cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return Status(Errc::kInvalidArgument,
                    "config line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));

    auto fail = [&](const std::string& what) {
      return Status(Errc::kInvalidArgument,
                    "config line " + std::to_string(line_no) + ": " + what);
    };

    if (key == "port") {
      auto v = parse_unsigned(value, 65535);
      if (!v.is_ok()) return fail(v.status().message());
      cfg.port = static_cast<std::uint16_t>(v.value());
    } else if (key == "data-dir") {
      cfg.data_dir = value;
    } else if (key == "scan.interval") {
      auto v = parse_duration(value);
      if (!v.is_ok()) return fail(v.status().message());
      cfg.scan_interval = v.value();
    } else if (key == "scan.enabled") {
      auto v = parse_bool(value);
      if (!v.is_ok()) return fail(v.status().message());
      cfg.scan_enabled = v.value();
    } else if (key == "journal.fsync") {
      auto v = parse_bool(value);
      if (!v.is_ok()) return fail(v.status().message());
      cfg.journal_fsync = v.value();
    } else if (key.rfind("token.", 0) == 0) {
      std::string name = key.substr(6);
      if (name.empty()) return fail("token name missing");
      std::istringstream parts{value};
      std::string role_str, uid_str, gid_str;
      if (!std::getline(parts, role_str, ':') || !std::getline(parts, uid_str, ':') ||
          !std::getline(parts, gid_str)) {
        return fail("token value must be <role>:<uid>:<gid>");
      }
      auto role = parse_role(role_str);
      if (!role.is_ok() || role.value() == Role::kAnonymous) {
        return fail("token role must be user or admin");
      }
      auto uid = parse_unsigned(uid_str, 0xffffffffull);
      auto gid = parse_unsigned(gid_str, 0xffffffffull);
      if (!uid.is_ok() || !gid.is_ok()) return fail("token uid/gid must be integers");
      cfg.tokens[name] = TokenEntry{role.value(), static_cast<std::uint32_t>(uid.value()),
                                    static_cast<std::uint32_t>(gid.value())};
    } else {
      return fail("unknown key: " + key);
    }
  }
  return cfg;
}

Result<Config> Config::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return Status(Errc::kIoError, "cannot read config file: " + file.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text);
}

AuthContext Config::resolve_token(std::string_view token) const {
  auto it = tokens.find(std::string(token));
  if (it == tokens.end()) return AuthContext::anonymous();
  AuthContext ctx;
  ctx.subject = it->first;
  ctx.role = it->second.role;
  ctx.uid = it->second.uid;
  ctx.gid = it->second.gid;
  return ctx;
}

std::string format_human_size(std::uint64_t bytes) {
  if (bytes < 1024) return std::to_string(bytes) + "B";
  static constexpr const char* kUnits[] = {"KiB", "MiB", "GiB", "TiB", "PiB", "EiB"};
  double value = static_cast<double>(bytes);
  int unit = -1;
  while (value >= 1024.0 && unit < 5) {
    value /= 1024.0;
    ++unit;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%s", value, kUnits[unit]);
  return buf;
}

}  // namespace quotafs
