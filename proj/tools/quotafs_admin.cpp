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

// quotafs-admin: command-line quota administration.
//
//   remove group quota <gid>
//   remove user quota <uid>
//   set group quota [OPTIONS] <gid>
//   set user quota [OPTIONS] <uid>
//   show group quota [-gid=<string>] [-h]
//   show user quota [-h] [-uid=<string>]
//   scan now
//
// OPTIONS for set: -custodial=<bytes>|none -replica=<bytes>|none
//                  -output=<bytes>|none

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "quotafs/config.hpp"
#include "quotafs/json_codec.hpp"
#include "quotafs/rest_client.hpp"
#include "quotafs/types.hpp"

namespace {

using quotafs::RestClient;
using json = quotafs::codec::json;

constexpr int kOk = 0;
constexpr int kApiError = 1;
constexpr int kUsageError = 2;

void usage(FILE* out) {
  std::fprintf(out,
               "usage: quotafs-admin [--server <url>] [--token <token>] <command>\n"
               "\n"
               "commands:\n"
               "  remove user quota <uid>\n"
               "  remove group quota <gid>\n"
               "  set user quota [-custodial=<bytes>|none] [-replica=<bytes>|none]\n"
               "                 [-output=<bytes>|none] <uid>\n"
               "  set group quota [OPTIONS] <gid>\n"
               "  show user quota [-h] [-uid=<string>]\n"
               "  show group quota [-gid=<string>] [-h]\n"
               "  scan now\n"
               "\n"
               "environment: QUOTA_SERVER_URL, QUOTA_TOKEN\n");
}

std::optional<std::uint32_t> parse_id(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
    if (v > 0xffffffffull) return std::nullopt;
  }
  return static_cast<std::uint32_t>(v);
}

std::string cell(const json& used, const json& limit, bool human) {
  auto render = [human](std::uint64_t v) {
    return human ? quotafs::format_human_size(v) : std::to_string(v);
  };
  std::string out = render(used.get<std::uint64_t>());
  out += "/";
  out += limit.is_null() ? "-" : render(limit.get<std::uint64_t>());
  return out;
}

void print_rows(const json& quotas, bool human) {
  std::printf("%-10s%-23s%-23s%s\n", "ID", "REPLICA", "CUSTODIAL", "OUTPUT");
  for (const auto& q : quotas) {
    std::printf("%-10s%-23s%-23s%s\n", std::to_string(q["id"].get<std::uint64_t>()).c_str(),
                cell(q["replicaSpaceUsed"], q["replicaLimit"], human).c_str(),
                cell(q["custodialSpaceUsed"], q["custodialLimit"], human).c_str(),
                cell(q["outputSpaceUsed"], q["outputLimit"], human).c_str());
  }
}

int api_fail(const RestClient::Response& res) {
  std::fprintf(stderr, "error: %s\n", res.error_message().c_str());
  return kApiError;
}

int usage_fail(const std::string& what) {
  std::fprintf(stderr, "error: %s\n", what.c_str());
  usage(stderr);
  return kUsageError;
}

}  // namespace

int main(int argc, char** argv) {
  std::string server = "http://127.0.0.1:3880";
  if (const char* env = std::getenv("QUOTA_SERVER_URL"); env != nullptr && *env != '\0') {
    server = env;
  }
  std::string token;
  if (const char* env = std::getenv("QUOTA_TOKEN"); env != nullptr) token = env;

  std::vector<std::string> words;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto take_value = [&](const std::string& flag, std::string& out) -> int {
      if (arg.rfind(flag + "=", 0) == 0) {
        out = arg.substr(flag.size() + 1);
        return 1;
      }
      if (arg == flag) {
        if (i + 1 >= argc) return -1;
        out = argv[++i];
        return 1;
      }
      return 0;
    };
    int r = take_value("--server", server);
    if (r == -1) return usage_fail("--server needs a value");
    if (r == 1) continue;
    r = take_value("--token", token);
    if (r == -1) return usage_fail("--token needs a value");
    if (r == 1) continue;
    if (arg == "--help") {
      usage(stdout);
      return kOk;
    }
    words.push_back(std::move(arg));
  }

  if (words.empty()) return usage_fail("missing command");

  RestClient client(server, token);
  const std::string& verb = words[0];

  if (verb == "scan") {
    if (words.size() != 2 || words[1] != "now") return usage_fail("expected: scan now");
    auto res = client.post("/api/v1/admin/scan", json::object());
    if (!res.is_2xx()) return api_fail(res);
    std::printf("scan %llu complete: %llu entries\n",
                static_cast<unsigned long long>(res.body.value("scanSeq", std::uint64_t{0})),
                static_cast<unsigned long long>(res.body.value("entriesScanned", std::uint64_t{0})));
    return kOk;
  }

  if (verb != "remove" && verb != "set" && verb != "show") {
    return usage_fail("unknown command: " + verb);
  }
  if (words.size() < 3 || (words[1] != "user" && words[1] != "group") || words[2] != "quota") {
    return usage_fail("expected: " + verb + " user|group quota ...");
  }
  const std::string& scope = words[1];
  std::vector<std::string> rest(words.begin() + 3, words.end());

  if (verb == "remove") {
    if (rest.size() != 1) return usage_fail("expected: remove " + scope + " quota <id>");
    auto id = parse_id(rest[0]);
    if (!id) return usage_fail("id must be a decimal integer: " + rest[0]);
    auto res = client.del("/api/v1/quota/" + scope + "/" + std::to_string(*id));
    if (!res.is_2xx()) return api_fail(res);
    return kOk;
  }

  if (verb == "set") {
    json post_body = json::object();
    json patch_body = json::object();
    std::optional<std::uint32_t> id;
    for (const auto& arg : rest) {
      if (arg.rfind("-custodial=", 0) == 0 || arg.rfind("-replica=", 0) == 0 ||
          arg.rfind("-output=", 0) == 0) {
        auto eq = arg.find('=');
        std::string field = arg.substr(1, eq - 1);
        std::string value = arg.substr(eq + 1);
        std::string json_field =
            field == "custodial" ? "custodialLimit" : field == "replica" ? "replicaLimit"
                                                                         : "outputLimit";
        if (value == "none") {
          patch_body[json_field] = nullptr;
        } else {
          std::uint64_t v = 0;
          bool numeric = !value.empty();
          for (char c : value) {
            if (c < '0' || c > '9') {
              numeric = false;
              break;
            }
            v = v * 10 + static_cast<std::uint64_t>(c - '0');
          }
          if (!numeric) return usage_fail("-" + field + " needs a byte count or none");
          post_body[json_field] = v;
          patch_body[json_field] = v;
        }
      } else if (!arg.empty() && arg[0] == '-') {
        return usage_fail("unknown flag: " + arg);
      } else {
        if (id) return usage_fail("more than one id given");
        id = parse_id(arg);
        if (!id) return usage_fail("id must be a decimal integer: " + arg);
      }
    }
    if (!id) return usage_fail("expected: set " + scope + " quota [OPTIONS] <id>");
    const std::string path = "/api/v1/quota/" + scope + "/" + std::to_string(*id);
    auto res = client.post(path, post_body);
    if (res.status == 409) res = client.patch(path, patch_body);
    if (!res.is_2xx()) return api_fail(res);
    return kOk;
  }

  // show
  bool human = false;
  std::optional<std::uint32_t> id;
  const std::string id_flag = scope == "user" ? "-uid=" : "-gid=";
  for (const auto& arg : rest) {
    if (arg == "-h") {
      human = true;
    } else if (arg.rfind(id_flag, 0) == 0) {
      id = parse_id(arg.substr(id_flag.size()));
      if (!id) return usage_fail("id must be a decimal integer: " + arg);
    } else {
      return usage_fail("unknown flag: " + arg);
    }
  }
  if (id) {
    auto res = client.get("/api/v1/quota/" + scope + "/" + std::to_string(*id));
    if (!res.is_2xx()) return api_fail(res);
    json rows = json::array({res.body});
    print_rows(rows, human);
    return kOk;
  }
  auto res = client.get("/api/v1/quota/" + scope);
  if (!res.is_2xx()) return api_fail(res);
  print_rows(res.body, human);
  return kOk;
}
