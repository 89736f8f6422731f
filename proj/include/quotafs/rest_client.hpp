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

#include "quotafs/json_codec.hpp"

namespace httplib {
class Client;
}

namespace quotafs {

// Minimal JSON-over-HTTP client for the service API.
class RestClient {
 public:
  RestClient(const std::string& base_url, std::string token);
  ~RestClient();

  struct Response {
    bool transport_ok = false;
    int status = 0;
    codec::json body;  // parsed JSON, or null when the body is not JSON
    std::string error;

    bool is_2xx() const { return transport_ok && status / 100 == 2; }
    std::string error_message() const;
  };

  Response get(const std::string& path);
  Response post(const std::string& path, const codec::json& body);
  Response put(const std::string& path, const codec::json& body);
  Response patch(const std::string& path, const codec::json& body);
  Response del(const std::string& path);

 private:
  Response wrap(int err, int status, const std::string& body) const;

  std::unique_ptr<httplib::Client> client_;
  std::string token_;
};

}  // namespace quotafs
