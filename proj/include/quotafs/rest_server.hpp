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

#include <memory>
#include <string>
#include <thread>

#include "quotafs/config.hpp"
#include "quotafs/service.hpp"
#include "quotafs/status.hpp"

namespace httplib {
class Server;
}

namespace quotafs {

// HTTP/JSON surface under /api/v1:
//
//   GET    /quota/user             all user quotas (authenticated)
//   GET    /quota/group            all group quotas (authenticated)
//   GET    /quota/user/{id}        one quota (authenticated)
//   POST   /quota/user/{id}        add quota (admin)
//   PATCH  /quota/user/{id}        modify quota (admin)
//   DELETE /quota/user/{id}        remove quota (admin)
//   ... and the same four under /quota/group/{id}
//
//   PUT/GET/DELETE /ns/files/{path}   namespace entries (create commits an
//                                     optional size in the same call)
//   PATCH  /ns/files/{path}           commit a size
//   PUT    /ns/dirs/{path}            create a directory
//   POST   /admin/scan                run an aggregation scan now (admin)
//
// Quota denial on the data path returns 507 {"error":"Quota exceeded"}.
class RestServer {
 public:
  RestServer(Service& service, Config config);
  ~RestServer();

  RestServer(const RestServer&) = delete;
  RestServer& operator=(const RestServer&) = delete;

  // Binds and serves on a background thread. With any_port, picks a free
  // port (tests); otherwise uses config.port. Returns the bound port.
  Result<int> start(bool any_port = false);
  void stop();
  int port() const { return port_; }

 private:
  void setup_routes();

  Service& service_;
  Config config_;
  std::unique_ptr<httplib::Server> server_;
  std::thread serve_thread_;
  int port_ = 0;
};

}  // namespace quotafs
