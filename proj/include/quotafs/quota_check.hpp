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

#include <cstdint>
#include <string>

#include "quotafs/types.hpp"

namespace quotafs {

struct CheckDecision {
  bool allowed = true;
  std::string reason;  // set on deny, names the scope that is over

  static CheckDecision allow() { return {}; }
  static CheckDecision deny(std::string reason) { return {false, std::move(reason)}; }
};

// What the namespace asks before inserting a new file entry. Implementations
// must answer from cached state only: O(1), no aggregation.
class QuotaChecker {
 public:
  virtual ~QuotaChecker() = default;
  virtual CheckDecision check(std::uint32_t uid, std::uint32_t gid,
                              RetentionPolicy policy) const = 0;
};

}  // namespace quotafs
