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

#include "quotafs/rest_server.hpp"

#include <httplib.h>

#include <cerrno>
#include <cstdlib>
#include <optional>

#include "quotafs/json_codec.hpp"

namespace quotafs {

namespace {

using codec::json;

int http_status_for(const Status& st) {
  switch (st.code()) {
    case Errc::kOk: return 200;
    case Errc::kInvalidArgument: return 400;
    case Errc::kUnauthenticated: return 401;
    case Errc::kForbidden: return 403;
    case Errc::kNotFound: return 404;
    case Errc::kAlreadyExists: return 409;
    case Errc::kDirectoryNotEmpty: return 409;
    case Errc::kNotAFile: return 409;
    case Errc::kScanInProgress: return 409;
    case Errc::kQuotaExceeded: return 507;
    default: return 500;
  }
}

void send_error(httplib::Response& res, const Status& st) {
  json body;
  body["error"] = st.message().empty() ? std::string(errc_name(st.code())) : st.message();
  res.status = http_status_for(st);
  res.set_content(body.dump(), "application/json");
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::optional<json> parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto parsed = json::parse(req.body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  return parsed;
}

// Limit fields for POST: null and absent both mean unlimited.
Result<LimitsInput> limits_input_from(const json& body) {
  LimitsInput input;
  struct Field {
    const char* name;
    std::optional<std::int64_t>* slot;
  };
  Field fields[] = {{"custodialLimit", &input.custodial},
                    {"replicaLimit", &input.replica},
                    {"outputLimit", &input.output}};
  for (const auto& field : fields) {
    auto it = body.find(field.name);
    if (it == body.end() || it->is_null()) continue;
    if (!it->is_number_integer() && !it->is_number_unsigned()) {
      return Status(Errc::kInvalidArgument, std::string(field.name) + " must be a byte count");
    }
    *field.slot = it->get<std::int64_t>();
  }
  return input;
}

// Limit fields for PATCH: absent = untouched, null = set unlimited.
Result<LimitsPatch> limits_patch_from(const json& body) {
  LimitsPatch patch;
  struct Field {
    const char* name;
    std::optional<std::optional<std::int64_t>>* slot;
  };
  Field fields[] = {{"custodialLimit", &patch.custodial},
                    {"replicaLimit", &patch.replica},
                    {"outputLimit", &patch.output}};
  for (const auto& field : fields) {
    auto it = body.find(field.name);
    if (it == body.end()) continue;
    if (it->is_null()) {
      *field.slot = std::optional<std::int64_t>{};
      continue;
    }
    if (!it->is_number_integer() && !it->is_number_unsigned()) {
      return Status(Errc::kInvalidArgument, std::string(field.name) + " must be a byte count");
    }
    *field.slot = std::optional<std::int64_t>{it->get<std::int64_t>()};
  }
  return patch;
}

Result<std::uint32_t> id_from_match(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end == nullptr || *end != '\0' || errno != 0 || v > 0xffffffffull) {
    return Status(Errc::kInvalidArgument, "id out of range: " + text);
  }
  return static_cast<std::uint32_t>(v);
}

Result<std::uint32_t> u32_field(const json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end() || !it->is_number_unsigned()) {
    return Status(Errc::kInvalidArgument, std::string(name) + " must be a non-negative integer");
  }
  auto v = it->get<std::uint64_t>();
  if (v > 0xffffffffull) {
    return Status(Errc::kInvalidArgument, std::string(name) + " out of range");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

RestServer::RestServer(Service& service, Config config)
    : service_(service), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  setup_routes();
}

RestServer::~RestServer() { stop(); }

Result<int> RestServer::start(bool any_port) {
  if (any_port) {
    port_ = server_->bind_to_any_port("127.0.0.1");
    if (port_ <= 0) return Status(Errc::kIoError, "cannot bind to a port");
  } else {
    if (!server_->bind_to_port("0.0.0.0", config_.port)) {
      return Status(Errc::kIoError, "cannot bind port " + std::to_string(config_.port));
    }
    port_ = config_.port;
  }
  serve_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void RestServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
  if (serve_thread_.joinable()) serve_thread_.join();
}

void RestServer::setup_routes() {
  auto& svr = *server_;

  // Anonymous = no Authorization header. A header that is present but does
  // not resolve to a configured token fails closed.
  auto authenticate = [this](const httplib::Request& req) -> Result<AuthContext> {
    if (!req.has_header("Authorization")) return AuthContext::anonymous();
    const std::string header = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    if (header.rfind(prefix, 0) != 0) {
      return Status(Errc::kUnauthenticated, "unsupported Authorization scheme");
    }
    AuthContext ctx = config_.resolve_token(header.substr(prefix.size()));
    if (!ctx.authenticated()) return Status(Errc::kUnauthenticated, "unknown token");
    return ctx;
  };

  auto require = [authenticate](const httplib::Request& req, httplib::Response& res, Role least,
                                AuthContext& out) {
    auto ctx = authenticate(req);
    if (!ctx.is_ok()) {
      send_error(res, ctx.status());
      return false;
    }
    if (least != Role::kAnonymous && !ctx->authenticated()) {
      send_error(res, Status(Errc::kUnauthenticated, "authentication required"));
      return false;
    }
    if (least == Role::kAdmin && !ctx->is_admin()) {
      send_error(res, Status(Errc::kForbidden, "admin privileges required"));
      return false;
    }
    out = ctx.take();
    return true;
  };

  auto scope_of = [](const httplib::Request& req) {
    return req.matches[1] == "user" ? ScopeKind::kUser : ScopeKind::kGroup;
  };

  auto key_of = [scope_of](const httplib::Request& req) -> Result<QuotaKey> {
    auto id = id_from_match(req.matches[2]);
    if (!id.is_ok()) return id.status();
    return QuotaKey{scope_of(req), id.value()};
  };

  // --- quota admin routes (Fig. 3 shape) ---

  svr.Get(R"(/api/v1/quota/(user|group))",
          [this, require, scope_of](const httplib::Request& req, httplib::Response& res) {
            AuthContext ctx;
            if (!require(req, res, Role::kUser, ctx)) return;
            auto quotas = service_.engine().list_quotas(scope_of(req), ctx);
            if (!quotas.is_ok()) return send_error(res, quotas.status());
            json body = json::array();
            for (const auto& quota : quotas.value()) body.push_back(codec::quota_to_json(quota));
            send_json(res, body);
          });

  svr.Get(R"(/api/v1/quota/(user|group)/(\d+))",
          [this, require, key_of](const httplib::Request& req, httplib::Response& res) {
            AuthContext ctx;
            if (!require(req, res, Role::kUser, ctx)) return;
            auto key = key_of(req);
            if (!key.is_ok()) return send_error(res, key.status());
            auto quota = service_.engine().get_quota(key.value(), ctx);
            if (!quota.is_ok()) return send_error(res, quota.status());
            send_json(res, codec::quota_to_json(quota.value()));
          });

  svr.Post(R"(/api/v1/quota/(user|group)/(\d+))",
           [this, require, key_of](const httplib::Request& req, httplib::Response& res) {
             AuthContext ctx;
             if (!require(req, res, Role::kAdmin, ctx)) return;
             auto key = key_of(req);
             if (!key.is_ok()) return send_error(res, key.status());
             auto body = parse_body(req);
             if (!body) return send_error(res, Status(Errc::kInvalidArgument, "malformed JSON body"));
             auto input = limits_input_from(*body);
             if (!input.is_ok()) return send_error(res, input.status());
             auto quota = service_.engine().put_quota(key.value(), input.value(), ctx);
             if (!quota.is_ok()) return send_error(res, quota.status());
             send_json(res, codec::quota_to_json(quota.value()), 201);
           });

  svr.Patch(R"(/api/v1/quota/(user|group)/(\d+))",
            [this, require, key_of](const httplib::Request& req, httplib::Response& res) {
              AuthContext ctx;
              if (!require(req, res, Role::kAdmin, ctx)) return;
              auto key = key_of(req);
              if (!key.is_ok()) return send_error(res, key.status());
              auto body = parse_body(req);
              if (!body) return send_error(res, Status(Errc::kInvalidArgument, "malformed JSON body"));
              auto patch = limits_patch_from(*body);
              if (!patch.is_ok()) return send_error(res, patch.status());
              auto quota = service_.engine().modify_quota(key.value(), patch.value(), ctx);
              if (!quota.is_ok()) return send_error(res, quota.status());
              send_json(res, codec::quota_to_json(quota.value()));
            });

  svr.Delete(R"(/api/v1/quota/(user|group)/(\d+))",
             [this, require, key_of](const httplib::Request& req, httplib::Response& res) {
               AuthContext ctx;
               if (!require(req, res, Role::kAdmin, ctx)) return;
               auto key = key_of(req);
               if (!key.is_ok()) return send_error(res, key.status());
               auto quota = service_.engine().remove_quota(key.value(), ctx);
               if (!quota.is_ok()) return send_error(res, quota.status());
               res.status = 204;
             });

  // --- namespace routes ---

  svr.Put(R"(/api/v1/ns/files/(.+))",
          [this, require](const httplib::Request& req, httplib::Response& res) {
            AuthContext ctx;
            if (!require(req, res, Role::kUser, ctx)) return;
            auto body = parse_body(req);
            if (!body) return send_error(res, Status(Errc::kInvalidArgument, "malformed JSON body"));
            auto uid = u32_field(*body, "uid");
            if (!uid.is_ok()) return send_error(res, uid.status());
            auto gid = u32_field(*body, "gid");
            if (!gid.is_ok()) return send_error(res, gid.status());

            std::optional<RetentionPolicy> policy;
            if (auto it = body->find("retentionPolicy"); it != body->end() && !it->is_null()) {
              if (!it->is_string())
                return send_error(res, Status(Errc::kInvalidArgument, "retentionPolicy must be a string"));
              auto parsed = parse_retention_policy(it->get<std::string>());
              if (!parsed.is_ok()) return send_error(res, parsed.status());
              policy = parsed.value();
            }
            std::optional<AccessLatency> latency;
            if (auto it = body->find("accessLatency"); it != body->end() && !it->is_null()) {
              if (!it->is_string())
                return send_error(res, Status(Errc::kInvalidArgument, "accessLatency must be a string"));
              auto parsed = parse_access_latency(it->get<std::string>());
              if (!parsed.is_ok()) return send_error(res, parsed.status());
              latency = parsed.value();
            }

            const std::string path = "/" + std::string(req.matches[1]);
            auto entry = service_.ns().create_entry(path, uid.value(), gid.value(), policy,
                                                    latency, ctx);
            if (!entry.is_ok()) return send_error(res, entry.status());

            if (auto it = body->find("sizeBytes"); it != body->end() && !it->is_null()) {
              if (!it->is_number_unsigned())
                return send_error(res,
                                  Status(Errc::kInvalidArgument, "sizeBytes must be non-negative"));
              auto committed = service_.ns().commit_size(entry->id, it->get<std::uint64_t>());
              if (!committed.is_ok()) return send_error(res, committed.status());
              return send_json(res, codec::entry_to_json(EntryInfo(committed.take())), 201);
            }
            send_json(res, codec::entry_to_json(EntryInfo(entry.take())), 201);
          });

  svr.Patch(R"(/api/v1/ns/files/(.+))",
            [this, require](const httplib::Request& req, httplib::Response& res) {
              AuthContext ctx;
              if (!require(req, res, Role::kUser, ctx)) return;
              auto body = parse_body(req);
              if (!body) return send_error(res, Status(Errc::kInvalidArgument, "malformed JSON body"));
              auto it = body->find("sizeBytes");
              if (it == body->end() || !it->is_number_unsigned()) {
                return send_error(res,
                                  Status(Errc::kInvalidArgument, "sizeBytes must be non-negative"));
              }
              const std::string path = "/" + std::string(req.matches[1]);
              auto info = service_.ns().stat(path);
              if (!info.is_ok()) return send_error(res, info.status());
              auto committed =
                  service_.ns().commit_size(entry_id(info.value()), it->get<std::uint64_t>());
              if (!committed.is_ok()) return send_error(res, committed.status());
              send_json(res, codec::entry_to_json(EntryInfo(committed.take())));
            });

  svr.Get(R"(/api/v1/ns/files/(.+))",
          [this, authenticate](const httplib::Request& req, httplib::Response& res) {
            // Reads are open to anonymous callers, but presented credentials
            // must still be valid.
            auto ctx = authenticate(req);
            if (!ctx.is_ok()) return send_error(res, ctx.status());
            const std::string path = "/" + std::string(req.matches[1]);
            auto info = service_.ns().stat(path);
            if (!info.is_ok()) return send_error(res, info.status());
            send_json(res, codec::entry_to_json(info.value()));
          });

  svr.Delete(R"(/api/v1/ns/files/(.+))",
             [this, require](const httplib::Request& req, httplib::Response& res) {
               AuthContext ctx;
               if (!require(req, res, Role::kUser, ctx)) return;
               const std::string path = "/" + std::string(req.matches[1]);
               auto removed = service_.ns().remove_entry(path, ctx);
               if (!removed.is_ok()) return send_error(res, removed.status());
               send_json(res, codec::entry_to_json(removed.value()));
             });

  svr.Put(R"(/api/v1/ns/dirs/(.+))",
          [this, require](const httplib::Request& req, httplib::Response& res) {
            AuthContext ctx;
            if (!require(req, res, Role::kUser, ctx)) return;
            auto body = parse_body(req);
            if (!body) return send_error(res, Status(Errc::kInvalidArgument, "malformed JSON body"));
            auto uid = u32_field(*body, "uid");
            if (!uid.is_ok()) return send_error(res, uid.status());
            auto gid = u32_field(*body, "gid");
            if (!gid.is_ok()) return send_error(res, gid.status());

            std::optional<RetentionPolicy> policy;
            if (auto it = body->find("defaultRetentionPolicy"); it != body->end() && !it->is_null()) {
              auto parsed = parse_retention_policy(it->get<std::string>());
              if (!parsed.is_ok()) return send_error(res, parsed.status());
              policy = parsed.value();
            }
            std::optional<AccessLatency> latency;
            if (auto it = body->find("defaultAccessLatency"); it != body->end() && !it->is_null()) {
              auto parsed = parse_access_latency(it->get<std::string>());
              if (!parsed.is_ok()) return send_error(res, parsed.status());
              latency = parsed.value();
            }

            const std::string path = "/" + std::string(req.matches[1]);
            auto dir = service_.ns().make_directory(path, uid.value(), gid.value(), policy,
                                                    latency, ctx);
            if (!dir.is_ok()) return send_error(res, dir.status());
            send_json(res, codec::entry_to_json(EntryInfo(dir.take())), 201);
          });

  svr.Post("/api/v1/admin/scan",
           [this, require](const httplib::Request& req, httplib::Response& res) {
             AuthContext ctx;
             if (!require(req, res, Role::kAdmin, ctx)) return;
             auto report = service_.scanner().run_scan_now();
             if (!report.is_ok()) return send_error(res, report.status());
             send_json(res, codec::scan_report_to_json(report.value()));
           });
}

}  // namespace quotafs
