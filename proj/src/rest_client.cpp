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

#include "quotafs/rest_client.hpp"

#include <httplib.h>

namespace quotafs {

RestClient::RestClient(const std::string& base_url, std::string token)
    : client_(std::make_unique<httplib::Client>(base_url)), token_(std::move(token)) {
  client_->set_connection_timeout(5, 0);
  client_->set_read_timeout(30, 0);
  if (!token_.empty()) {
    client_->set_default_headers({{"Authorization", "Bearer " + token_}});
  }
}

RestClient::~RestClient() = default;

RestClient::Response RestClient::wrap(int err, int status, const std::string& body) const {
  Response out;
  if (err != 0) {
    out.error = "transport error: " + httplib::to_string(static_cast<httplib::Error>(err));
    return out;
  }
  out.transport_ok = true;
  out.status = status;
  if (!body.empty()) {
    auto parsed = codec::json::parse(body, nullptr, false);
    if (!parsed.is_discarded()) out.body = std::move(parsed);
  }
  return out;
}

std::string RestClient::Response::error_message() const {
  if (!transport_ok) return error;
  if (body.is_object() && body.contains("error") && body["error"].is_string()) {
    return body["error"].get<std::string>();
  }
  return "HTTP " + std::to_string(status);
}

RestClient::Response RestClient::get(const std::string& path) {
  auto res = client_->Get(path);
  if (!res) return wrap(static_cast<int>(res.error()), 0, "");
  return wrap(0, res->status, res->body);
}

RestClient::Response RestClient::post(const std::string& path, const codec::json& body) {
  auto res = client_->Post(path, body.dump(), "application/json");
  if (!res) return wrap(static_cast<int>(res.error()), 0, "");
  return wrap(0, res->status, res->body);
}

RestClient::Response RestClient::put(const std::string& path, const codec::json& body) {
  auto res = client_->Put(path, body.dump(), "application/json");
  if (!res) return wrap(static_cast<int>(res.error()), 0, "");
  return wrap(0, res->status, res->body);
}

RestClient::Response RestClient::patch(const std::string& path, const codec::json& body) {
  auto res = client_->Patch(path, body.dump(), "application/json");
  if (!res) return wrap(static_cast<int>(res.error()), 0, "");
  return wrap(0, res->status, res->body);
}

RestClient::Response RestClient::del(const std::string& path) {
  auto res = client_->Delete(path);
  if (!res) return wrap(static_cast<int>(res.error()), 0, "");
  return wrap(0, res->status, res->body);
}

}  // namespace quotafs
