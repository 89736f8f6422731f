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

#include "quotafs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace quotafs::harness {

namespace {

using codec::json;

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

Result<std::uint64_t> parse_u64(const std::string& text) {
  if (text.empty()) return Status(Errc::kInvalidArgument, "empty number");
  std::uint64_t v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return Status(Errc::kInvalidArgument, "not a number: " + text);
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

Result<std::uint32_t> parse_u32(const std::string& text) {
  auto v = parse_u64(text);
  if (!v.is_ok()) return v.status();
  if (v.value() > 0xffffffffull) return Status(Errc::kInvalidArgument, "out of range: " + text);
  return static_cast<std::uint32_t>(v.value());
}

// "key=value" -> {key, value}; bare words get an empty value.
std::pair<std::string, std::string> split_kv(const std::string& tok) {
  auto eq = tok.find('=');
  if (eq == std::string::npos) return {tok, ""};
  return {tok.substr(0, eq), tok.substr(eq + 1)};
}

std::string policy_arg(const std::optional<RetentionPolicy>& policy) {
  return policy ? std::string(to_string(*policy)) : std::string("REPLICA");
}

}  // namespace

Result<Scenario> Scenario::parse(std::string_view text) {
  Scenario scenario;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto fail = [&](const std::string& what) {
      return Status(Errc::kInvalidArgument,
                    "scenario line " + std::to_string(line_no) + ": " + what);
    };

    auto tokens = tokenize(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;

    ScenarioStep step;
    step.line_no = line_no;
    step.raw = line;
    const std::string& verb = tokens[0];

    if (verb == "seed") {
      if (tokens.size() != 2) return fail("seed takes one value");
      auto v = parse_u64(tokens[1]);
      if (!v.is_ok()) return fail(v.status().message());
      scenario.seed = v.value();
      continue;
    }

    if (verb == "scan") {
      if (tokens.size() != 1) return fail("scan takes no arguments");
      step.kind = ActionKind::kScan;
      scenario.steps.push_back(std::move(step));
      continue;
    }

    if (verb == "set-limit") {
      if (tokens.size() < 3) return fail("set-limit needs: set-limit user|group <id> ...");
      step.kind = ActionKind::kSetLimit;
      auto scope = parse_scope_kind(tokens[1]);
      if (!scope.is_ok()) return fail(scope.status().message());
      step.scope = scope.value();
      auto id = parse_u32(tokens[2]);
      if (!id.is_ok()) return fail(id.status().message());
      step.id = id.value();
      for (std::size_t i = 3; i < tokens.size(); ++i) {
        auto [key, value] = split_kv(tokens[i]);
        std::optional<std::optional<std::int64_t>>* slot = nullptr;
        if (key == "replica") slot = &step.limits.replica;
        else if (key == "custodial") slot = &step.limits.custodial;
        else if (key == "output") slot = &step.limits.output;
        else return fail("unknown set-limit argument: " + key);
        if (value == "none") {
          *slot = std::optional<std::int64_t>{};
        } else {
          auto v = parse_u64(value);
          if (!v.is_ok()) return fail(v.status().message());
          *slot = std::optional<std::int64_t>{static_cast<std::int64_t>(v.value())};
        }
      }
      scenario.steps.push_back(std::move(step));
      continue;
    }

    if (verb == "create" || verb == "mkdir" || verb == "commit" || verb == "remove" ||
        verb == "assert-check") {
      std::size_t arg_start = 1;
      if (verb != "assert-check") {
        if (tokens.size() < 2 || tokens[1].empty() || tokens[1][0] != '/') {
          return fail(verb + " needs an absolute path");
        }
        step.path = tokens[1];
        arg_start = 2;
      }
      if (verb == "create") step.kind = ActionKind::kCreate;
      else if (verb == "mkdir") step.kind = ActionKind::kMkdir;
      else if (verb == "commit") step.kind = ActionKind::kCommit;
      else if (verb == "remove") step.kind = ActionKind::kRemove;
      else step.kind = ActionKind::kAssertCheck;

      for (std::size_t i = arg_start; i < tokens.size(); ++i) {
        auto [key, value] = split_kv(tokens[i]);
        if (key == "uid" || key == "gid") {
          auto v = parse_u32(value);
          if (!v.is_ok()) return fail(v.status().message());
          (key == "uid" ? step.uid : step.gid) = v.value();
        } else if (key == "policy") {
          auto p = parse_retention_policy(value);
          if (!p.is_ok()) return fail(p.status().message());
          step.policy = p.value();
        } else if (key == "latency") {
          auto l = parse_access_latency(value);
          if (!l.is_ok()) return fail(l.status().message());
          step.latency = l.value();
        } else if (key == "size") {
          auto v = parse_u64(value);
          if (!v.is_ok()) return fail(v.status().message());
          step.size = v.value();
        } else if (key == "expect") {
          step.expect = value;
        } else {
          return fail("unknown argument: " + key);
        }
      }

      if (step.kind == ActionKind::kAssertCheck) {
        if (step.expect != "allow" && step.expect != "deny") {
          return fail("assert-check needs expect=allow or expect=deny");
        }
      } else if (step.kind == ActionKind::kCreate) {
        if (step.expect.empty()) step.expect = "ok";
        if (step.expect != "ok" && step.expect != "quota-exceeded") {
          return fail("create expect must be ok or quota-exceeded");
        }
      } else if (!step.expect.empty()) {
        return fail(verb + " does not take expect=");
      }
      scenario.steps.push_back(std::move(step));
      continue;
    }

    return fail("unknown action: " + verb);
  }
  return scenario;
}

Result<Scenario> Scenario::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return Status(Errc::kIoError, "cannot read scenario file: " + file.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text);
}

std::string ScenarioReport::to_string() const {
  std::ostringstream out;
  std::size_t failed = 0;
  for (const auto& step : steps) {
    out << "line " << step.line_no << ": " << step.action << " -> " << step.outcome;
    if (!step.expected.empty()) out << " (expected " << step.expected << ")";
    out << (step.pass ? " PASS" : " FAIL") << "\n";
    if (!step.pass) ++failed;
  }
  out << (passed ? "PASS" : "FAIL") << ": " << steps.size() - failed << "/" << steps.size()
      << " steps\n";
  return out.str();
}

namespace {

// Creates a zero-byte probe entry to sample the create gate, removing it
// again when admitted. Size 0 keeps every future scan unchanged.
std::string run_check_probe(RestClient& client, const ScenarioStep& step, int probe_no,
                            std::string& detail) {
  const std::string path = "/.check-probe-" + std::to_string(probe_no);
  json body;
  body["uid"] = step.uid;
  body["gid"] = step.gid;
  body["retentionPolicy"] = policy_arg(step.policy);
  auto res = client.put("/api/v1/ns/files" + path, body);
  if (res.status == 201) {
    auto cleanup = client.del("/api/v1/ns/files" + path);
    if (!cleanup.is_2xx()) {
      detail = "probe cleanup failed: " + cleanup.error_message();
      return "error";
    }
    return "allow";
  }
  if (res.status == 507) return "deny";
  detail = res.error_message();
  return "error";
}

}  // namespace

ScenarioReport run_scenario(RestClient& client, const Scenario& scenario) {
  ScenarioReport report;
  int probe_no = 0;
  for (const auto& step : scenario.steps) {
    StepTrace trace;
    trace.line_no = step.line_no;
    trace.action = step.raw;
    trace.expected = step.expect;

    std::string detail;
    switch (step.kind) {
      case ActionKind::kSetLimit: {
        json fields = json::object();
        auto add = [&fields](const char* name,
                             const std::optional<std::optional<std::int64_t>>& v) {
          if (!v.has_value()) return;
          if (v->has_value()) fields[name] = **v;
          else fields[name] = nullptr;
        };
        add("replicaLimit", step.limits.replica);
        add("custodialLimit", step.limits.custodial);
        add("outputLimit", step.limits.output);
        const std::string path = "/api/v1/quota/" + std::string(to_string(step.scope)) + "/" +
                                 std::to_string(step.id);
        json post_fields = json::object();
        for (auto& [k, v] : fields.items()) {
          if (!v.is_null()) post_fields[k] = v;
        }
        auto res = client.post(path, post_fields);
        if (res.status == 409) res = client.patch(path, fields);
        trace.outcome = res.is_2xx() ? "ok" : "error: " + res.error_message();
        trace.pass = res.is_2xx();
        break;
      }
      case ActionKind::kMkdir: {
        json body;
        body["uid"] = step.uid;
        body["gid"] = step.gid;
        auto res = client.put("/api/v1/ns/dirs" + step.path, body);
        trace.outcome = res.status == 201 ? "ok" : "error: " + res.error_message();
        trace.pass = res.status == 201;
        break;
      }
      case ActionKind::kCreate: {
        json body;
        body["uid"] = step.uid;
        body["gid"] = step.gid;
        if (step.policy) body["retentionPolicy"] = std::string(to_string(*step.policy));
        if (step.latency) body["accessLatency"] = std::string(to_string(*step.latency));
        auto res = client.put("/api/v1/ns/files" + step.path, body);
        if (res.status == 201) trace.outcome = "ok";
        else if (res.status == 507) trace.outcome = "quota-exceeded";
        else trace.outcome = "error: " + res.error_message();
        trace.pass = trace.outcome == step.expect;
        break;
      }
      case ActionKind::kCommit: {
        json body;
        body["sizeBytes"] = step.size;
        auto res = client.patch("/api/v1/ns/files" + step.path, body);
        trace.outcome = res.is_2xx() ? "ok" : "error: " + res.error_message();
        trace.pass = res.is_2xx();
        break;
      }
      case ActionKind::kRemove: {
        auto res = client.del("/api/v1/ns/files" + step.path);
        trace.outcome = res.is_2xx() ? "ok" : "error: " + res.error_message();
        trace.pass = res.is_2xx();
        break;
      }
      case ActionKind::kScan: {
        auto res = client.post("/api/v1/admin/scan", json::object());
        if (res.is_2xx()) {
          trace.outcome =
              "ok scanSeq=" + std::to_string(res.body.value("scanSeq", std::uint64_t{0}));
          trace.pass = true;
        } else {
          trace.outcome = "error: " + res.error_message();
          trace.pass = false;
        }
        break;
      }
      case ActionKind::kAssertCheck: {
        trace.outcome = run_check_probe(client, step, ++probe_no, detail);
        if (!detail.empty()) trace.outcome += " (" + detail + ")";
        trace.pass = trace.outcome == step.expect;
        break;
      }
    }
    if (!trace.pass) report.passed = false;
    report.steps.push_back(std::move(trace));
  }
  return report;
}

Result<std::unique_ptr<EmbeddedServer>> EmbeddedServer::start(ServiceOptions options) {
  auto svc = Service::open(options);
  if (!svc.is_ok()) return svc.status();

  auto server = std::make_unique<EmbeddedServer>();
  server->service_ = svc.take();

  Config cfg;
  cfg.tokens[kAdminToken] = TokenEntry{Role::kAdmin, 0, 0};
  cfg.tokens[kUserToken] = TokenEntry{Role::kUser, 1000, 2000};
  server->rest_ = std::make_unique<RestServer>(*server->service_, cfg);
  auto port = server->rest_->start(/*any_port=*/true);
  if (!port.is_ok()) return port.status();
  server->port_ = port.value();
  return server;
}

void ReferenceModel::set_limits(const QuotaKey& key, const LimitsPatch& patch) {
  QuotaLimits& limits = limits_[key];
  auto apply = [](std::optional<std::uint64_t>& slot,
                  const std::optional<std::optional<std::int64_t>>& field) {
    if (!field.has_value()) return;
    if (field->has_value()) slot = static_cast<std::uint64_t>(**field);
    else slot.reset();
  };
  apply(limits.replica_limit, patch.replica);
  apply(limits.custodial_limit, patch.custodial);
  apply(limits.output_limit, patch.output);
}

bool ReferenceModel::create(const std::string& path, const ModelFile& file) {
  return files_.emplace(path, file).second;
}

bool ReferenceModel::commit(const std::string& path, std::uint64_t size) {
  auto it = files_.find(path);
  if (it == files_.end()) return false;
  it->second.size = size;
  return true;
}

bool ReferenceModel::remove(const std::string& path) { return files_.erase(path) != 0; }

std::map<QuotaKey, PolicyBytes> ReferenceModel::aggregate() const {
  std::map<QuotaKey, PolicyBytes> out;
  for (const auto& [path, file] : files_) {
    out[QuotaKey{ScopeKind::kUser, file.uid}].at(file.policy) += file.size;
    out[QuotaKey{ScopeKind::kGroup, file.gid}].at(file.policy) += file.size;
  }
  return out;
}

void ReferenceModel::scan() { usage_ = aggregate(); }

bool ReferenceModel::scope_over(const QuotaKey& key, RetentionPolicy policy) const {
  auto lim = limits_.find(key);
  if (lim == limits_.end()) return false;
  const auto& limit = lim->second.for_policy(policy);
  if (!limit.has_value()) return false;
  auto used_it = usage_.find(key);
  std::uint64_t used = used_it == usage_.end() ? 0 : used_it->second.at(policy);
  return used >= *limit;
}

bool ReferenceModel::check_allowed(std::uint32_t uid, std::uint32_t gid,
                                   RetentionPolicy policy) const {
  return !scope_over(QuotaKey{ScopeKind::kUser, uid}, policy) &&
         !scope_over(QuotaKey{ScopeKind::kGroup, gid}, policy);
}

Result<FuzzReport> run_fuzz(RestClient& client, std::uint64_t seed, std::size_t steps) {
  std::mt19937_64 rng(seed);
  ReferenceModel model;
  FuzzReport report;
  report.seed = seed;
  std::ostringstream trace;

  auto pick_path = [&rng] { return "/f" + std::to_string(rng() % 24); };
  auto pick_policy = [&rng] { return kAllPolicies[rng() % kAllPolicies.size()]; };
  auto pick_uid = [&rng] { return static_cast<std::uint32_t>(1 + rng() % 4); };
  auto pick_gid = [&rng] { return static_cast<std::uint32_t>(1 + rng() % 3); };

  for (std::size_t i = 0; i < steps; ++i) {
    const std::uint64_t dice = rng() % 100;
    std::string line;
    std::string service_outcome;
    std::string model_outcome;

    if (dice < 12) {
      // set-limit
      QuotaKey key{rng() % 2 == 0 ? ScopeKind::kUser : ScopeKind::kGroup,
                   rng() % 2 == 0 ? pick_uid() : pick_gid()};
      LimitsPatch patch;
      auto roll = [&rng]() -> std::optional<std::optional<std::int64_t>> {
        std::uint64_t r = rng() % 3;
        if (r == 0) return std::nullopt;                                  // untouched
        if (r == 1) return std::optional<std::int64_t>{};                 // unlimited
        return std::optional<std::int64_t>{static_cast<std::int64_t>(rng() % 200)};
      };
      patch.replica = roll();
      patch.custodial = roll();
      patch.output = roll();

      json fields = json::object();
      auto add = [&fields](const char* name,
                           const std::optional<std::optional<std::int64_t>>& v) {
        if (!v.has_value()) return;
        if (v->has_value()) fields[name] = **v;
        else fields[name] = nullptr;
      };
      add("replicaLimit", patch.replica);
      add("custodialLimit", patch.custodial);
      add("outputLimit", patch.output);
      const std::string qpath = "/api/v1/quota/" + std::string(to_string(key.kind)) + "/" +
                                std::to_string(key.id);
      json post_fields = json::object();
      for (auto& [k, v] : fields.items()) {
        if (!v.is_null()) post_fields[k] = v;
      }
      auto res = client.post(qpath, post_fields);
      if (res.status == 409) res = client.patch(qpath, fields);
      service_outcome = res.is_2xx() ? "ok" : "error";
      model.set_limits(key, patch);
      model_outcome = "ok";
      line = "set-limit " + std::string(to_string(key.kind)) + " " + std::to_string(key.id) +
             " " + fields.dump();
    } else if (dice < 52) {
      // create
      const std::string path = pick_path();
      ReferenceModel::ModelFile file{pick_uid(), pick_gid(), pick_policy(), 0};
      json body;
      body["uid"] = file.uid;
      body["gid"] = file.gid;
      body["retentionPolicy"] = std::string(to_string(file.policy));
      auto res = client.put("/api/v1/ns/files" + path, body);
      if (res.status == 201) service_outcome = "ok";
      else if (res.status == 507) service_outcome = "quota-exceeded";
      else if (res.status == 409) service_outcome = "already-exists";
      else service_outcome = "error";

      if (model.files().count(path) != 0) {
        model_outcome = "already-exists";
      } else if (!model.check_allowed(file.uid, file.gid, file.policy)) {
        model_outcome = "quota-exceeded";
      } else {
        model.create(path, file);
        model_outcome = "ok";
      }
      line = "create " + path + " uid=" + std::to_string(file.uid) +
             " gid=" + std::to_string(file.gid) + " policy=" + std::string(to_string(file.policy));
    } else if (dice < 67) {
      // commit
      const std::string path = pick_path();
      const std::uint64_t size = rng() % 100;
      json body;
      body["sizeBytes"] = size;
      auto res = client.patch("/api/v1/ns/files" + path, body);
      if (res.is_2xx()) service_outcome = "ok";
      else if (res.status == 404) service_outcome = "not-found";
      else service_outcome = "error";
      model_outcome = model.commit(path, size) ? "ok" : "not-found";
      line = "commit " + path + " size=" + std::to_string(size);
    } else if (dice < 82) {
      // remove
      const std::string path = pick_path();
      auto res = client.del("/api/v1/ns/files" + path);
      if (res.is_2xx()) service_outcome = "ok";
      else if (res.status == 404) service_outcome = "not-found";
      else service_outcome = "error";
      model_outcome = model.remove(path) ? "ok" : "not-found";
      line = "remove " + path;
    } else if (dice < 92) {
      // scan
      auto res = client.post("/api/v1/admin/scan", json::object());
      service_outcome = res.is_2xx() ? "ok" : "error";
      model.scan();
      model_outcome = "ok";
      line = "scan";
    } else {
      // check
      const std::uint32_t uid = pick_uid();
      const std::uint32_t gid = pick_gid();
      const RetentionPolicy policy = pick_policy();
      ScenarioStep probe;
      probe.uid = uid;
      probe.gid = gid;
      probe.policy = policy;
      std::string detail;
      service_outcome = run_check_probe(client, probe, static_cast<int>(1000 + i), detail);
      model_outcome = model.check_allowed(uid, gid, policy) ? "allow" : "deny";
      line = "check uid=" + std::to_string(uid) + " gid=" + std::to_string(gid) +
             " policy=" + std::string(to_string(policy));
    }

    ++report.steps_run;
    const bool agree = service_outcome == model_outcome;
    if (!agree) ++report.divergences;
    trace << "step " << i << ": " << line << " -> service=" << service_outcome
          << " model=" << model_outcome << (agree ? "" : " DIVERGED") << "\n";
  }
  report.trace = trace.str();
  return report;
}

std::string LatencyStats::to_string() const {
  std::ostringstream out;
  out << "samples=" << samples << " p50=" << p50_us << "us p95=" << p95_us
      << "us p99=" << p99_us << "us traversals=" << traversals_delta
      << " cacheLookups=" << cache_lookups_delta << " scans=" << scans_completed;
  return out.str();
}

Result<LatencyStats> measure_create_latency(std::size_t n_files, BenchMode mode,
                                            std::chrono::milliseconds scan_interval) {
  auto svc = Service::open(ServiceOptions{});
  if (!svc.is_ok()) return svc.status();
  Service& service = *svc.value();

  const AuthContext admin = AuthContext::admin("bench");
  const std::uint32_t uid = 1000;
  const std::uint32_t gid = 2000;

  auto dir = service.ns().make_directory("/bench", 0, 0, std::nullopt, std::nullopt, admin);
  if (!dir.is_ok()) return dir.status();

  if (mode != BenchMode::kNoQuota) {
    LimitsInput roomy;
    roomy.replica = std::int64_t{1} << 62;
    roomy.custodial = std::int64_t{1} << 62;
    roomy.output = std::int64_t{1} << 62;
    auto u = service.engine().put_quota(QuotaKey{ScopeKind::kUser, uid}, roomy, admin);
    if (!u.is_ok()) return u.status();
    auto g = service.engine().put_quota(QuotaKey{ScopeKind::kGroup, gid}, roomy, admin);
    if (!g.is_ok()) return g.status();
  }
  if (mode == BenchMode::kQuotaWithScanner) {
    Status st = service.scanner().start_schedule({scan_interval, true});
    if (!st.is_ok()) return st;
  }

  // Warm up allocator and tree paths outside the measured window.
  const std::size_t warmup = std::min<std::size_t>(n_files, 1000);
  for (std::size_t i = 0; i < warmup; ++i) {
    auto e = service.ns().create_entry("/bench/warm-" + std::to_string(i), uid, gid,
                                       RetentionPolicy::kReplica, std::nullopt, admin);
    if (!e.is_ok()) return e.status();
  }

  const std::uint64_t traversals_before = service.ns().full_traversals();
  const std::uint64_t lookups_before = service.engine().cache_lookups();

  std::vector<double> samples_us;
  samples_us.reserve(n_files);
  for (std::size_t i = 0; i < n_files; ++i) {
    const std::string path = "/bench/f-" + std::to_string(i);
    auto t0 = std::chrono::steady_clock::now();
    auto e = service.ns().create_entry(path, uid, gid, RetentionPolicy::kReplica, std::nullopt,
                                       admin);
    auto t1 = std::chrono::steady_clock::now();
    if (!e.is_ok()) return e.status();
    samples_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
  }

  LatencyStats stats;
  stats.traversals_delta = service.ns().full_traversals() - traversals_before;
  stats.cache_lookups_delta = service.engine().cache_lookups() - lookups_before;
  service.scanner().stop_schedule();
  stats.scans_completed = service.scanner().scans_completed();
  stats.samples = samples_us.size();
  if (!samples_us.empty()) {
    std::sort(samples_us.begin(), samples_us.end());
    auto rank = [&](double pct) {
      std::size_t idx = static_cast<std::size_t>(
          std::max<double>(0.0, std::ceil(pct / 100.0 * samples_us.size()) - 1));
      return samples_us[std::min(idx, samples_us.size() - 1)];
    };
    stats.p50_us = rank(50.0);
    stats.p95_us = rank(95.0);
    stats.p99_us = rank(99.0);
  }
  return stats;
}

}  // namespace quotafs::harness
