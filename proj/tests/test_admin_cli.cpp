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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "quotafs/harness.hpp"

using namespace quotafs;
using harness::EmbeddedServer;

namespace {

const AuthContext kAdmin = AuthContext::admin("root");
const AuthContext kAlice = AuthContext::user("alice", 1000, 2000);

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Runs the real binary through the shell; server/token travel via env vars.
CliResult run_cli(const std::string& args, int port, const std::string& token = "admintok") {
  static std::mt19937_64 rng(std::random_device{}());
  const auto dir = std::filesystem::temp_directory_path();
  const auto out_path = dir / ("cli-out-" + std::to_string(rng()));
  const auto err_path = dir / ("cli-err-" + std::to_string(rng()));

  std::ostringstream cmd;
  cmd << "QUOTA_SERVER_URL=http://127.0.0.1:" << port << " QUOTA_TOKEN=" << token << " "
      << QUOTAFS_ADMIN_BIN << " " << args << " > " << out_path << " 2> " << err_path;
  int raw = std::system(cmd.str().c_str());

  CliResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::filesystem::remove(out_path);
  std::filesystem::remove(err_path);
  return result;
}

std::unique_ptr<EmbeddedServer> must_start() {
  auto started = EmbeddedServer::start();
  REQUIRE(started.is_ok());
  return started.take();
}

// Fixture matching the golden files: users {2,100,30}, groups {2000,5},
// usage aggregated from three committed files.
std::unique_ptr<EmbeddedServer> start_fixture_server() {
  auto started = EmbeddedServer::start();
  REQUIRE(started.is_ok());
  auto server = started.take();
  auto& s = server->service();

  LimitsInput user100;
  user100.custodial = 10'000;
  REQUIRE(s.engine().put_quota(QuotaKey{ScopeKind::kUser, 100}, user100, kAdmin).is_ok());
  LimitsInput user2;
  user2.replica = 512;
  REQUIRE(s.engine().put_quota(QuotaKey{ScopeKind::kUser, 2}, user2, kAdmin).is_ok());
  LimitsInput group2000;
  group2000.replica = 1'048'576;
  REQUIRE(s.engine().put_quota(QuotaKey{ScopeKind::kGroup, 2000}, group2000, kAdmin).is_ok());

  struct Row {
    const char* path;
    std::uint32_t uid, gid;
    RetentionPolicy policy;
    std::uint64_t size;
  };
  const Row rows[] = {
      {"/a", 2, 2000, RetentionPolicy::kReplica, 512},
      {"/b", 30, 2000, RetentionPolicy::kReplica, 2048},
      {"/c", 100, 5, RetentionPolicy::kCustodial, 1'048'576},
  };
  for (const auto& row : rows) {
    auto f = s.ns().create_entry(row.path, row.uid, row.gid, row.policy, std::nullopt, kAlice);
    REQUIRE(f.is_ok());
    REQUIRE(s.ns().commit_size(f->id, row.size).is_ok());
  }
  REQUIRE(s.scanner().run_scan_now().is_ok());
  return server;
}

std::string golden(const std::string& name) {
  const auto path = std::filesystem::path(QUOTAFS_GOLDEN_DIR) / name;
  std::string content = slurp(path);
  REQUIRE_MESSAGE(!content.empty(), "missing golden file: ", path.string());
  return content;
}

// The CLI needs a token the embedded server accepts.
constexpr const char* kAdminTok = EmbeddedServer::kAdminToken;

}  // namespace

TEST_CASE("golden output: show user/group quota, raw and humanized") {
  auto server = start_fixture_server();
  const int port = server->port();

  auto user_raw = run_cli("show user quota", port, kAdminTok);
  CHECK(user_raw.exit_code == 0);
  CHECK(user_raw.out == golden("show_user_raw.txt"));

  auto user_h = run_cli("show user quota -h", port, kAdminTok);
  CHECK(user_h.exit_code == 0);
  CHECK(user_h.out == golden("show_user_h.txt"));

  auto group_raw = run_cli("show group quota", port, kAdminTok);
  CHECK(group_raw.exit_code == 0);
  CHECK(group_raw.out == golden("show_group_raw.txt"));

  auto group_h = run_cli("show group quota -h", port, kAdminTok);
  CHECK(group_h.exit_code == 0);
  CHECK(group_h.out == golden("show_group_h.txt"));

  // Byte-stable across repeated invocations.
  auto again = run_cli("show user quota", port, kAdminTok);
  CHECK(again.out == user_raw.out);
}

TEST_CASE("every administrative command line parses and round-trips") {
  auto server = must_start();
  const int port = server->port();

  CHECK(run_cli("set user quota -custodial=10000 1000", port, kAdminTok).exit_code == 0);
  CHECK(run_cli("set group quota 2000", port, kAdminTok).exit_code == 0);
  CHECK(run_cli("set user quota -replica=5 -output=none 1000", port, kAdminTok).exit_code == 0);

  auto show_user = run_cli("show user quota -h -uid=1000", port, kAdminTok);
  CHECK(show_user.exit_code == 0);
  CHECK(show_user.out.find("1000") != std::string::npos);

  auto show_group = run_cli("show group quota -gid=2000 -h", port, kAdminTok);
  CHECK(show_group.exit_code == 0);
  CHECK(show_group.out.find("2000") != std::string::npos);

  CHECK(run_cli("show user quota", port, kAdminTok).exit_code == 0);
  CHECK(run_cli("show group quota", port, kAdminTok).exit_code == 0);
  CHECK(run_cli("scan now", port, kAdminTok).exit_code == 0);
  CHECK(run_cli("remove user quota 1000", port, kAdminTok).exit_code == 0);
  CHECK(run_cli("remove group quota 2000", port, kAdminTok).exit_code == 0);
}

TEST_CASE("set then show round-trips the configured limit") {
  auto server = must_start();
  const int port = server->port();

  REQUIRE(run_cli("set user quota -custodial=10000 1000", port, kAdminTok).exit_code == 0);
  auto shown = run_cli("show user quota -uid=1000", port, kAdminTok);
  CHECK(shown.exit_code == 0);
  CHECK(shown.out.find("0/10000") != std::string::npos);

  // Update in place and clear to unlimited.
  REQUIRE(run_cli("set user quota -custodial=20000 1000", port, kAdminTok).exit_code == 0);
  auto updated = run_cli("show user quota -uid=1000", port, kAdminTok);
  CHECK(updated.out.find("0/20000") != std::string::npos);

  REQUIRE(run_cli("set user quota -custodial=none 1000", port, kAdminTok).exit_code == 0);
  auto cleared = run_cli("show user quota -uid=1000", port, kAdminTok);
  CHECK(cleared.out.find("0/-") != std::string::npos);
}

TEST_CASE("humanized sizes render powers of 1024") {
  auto server = start_fixture_server();
  auto res = run_cli("show user quota -h -uid=100", server->port(), kAdminTok);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("1.0MiB") != std::string::npos);
  CHECK(res.out.find("9.8KiB") != std::string::npos);
}

TEST_CASE("error paths and exit codes") {
  auto server = must_start();
  const int port = server->port();

  auto missing = run_cli("remove user quota 9999", port, kAdminTok);
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("not found") != std::string::npos);

  auto forbidden = run_cli("set user quota -custodial=1 1000", port,
                           EmbeddedServer::kUserToken);
  CHECK(forbidden.exit_code == 1);

  auto bad_flag = run_cli("show user quota --frobnicate", port, kAdminTok);
  CHECK(bad_flag.exit_code == 2);
  auto bad_id = run_cli("remove user quota twelve", port, kAdminTok);
  CHECK(bad_id.exit_code == 2);
  auto missing_cmd = run_cli("", port, kAdminTok);
  CHECK(missing_cmd.exit_code == 2);
  auto half_grammar = run_cli("set user 1000", port, kAdminTok);
  CHECK(half_grammar.exit_code == 2);

  // Nothing listening on the far side.
  auto downed = run_cli("show user quota", 1, kAdminTok);
  CHECK(downed.exit_code == 1);
}
