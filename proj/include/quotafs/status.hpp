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

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace quotafs {

enum class Errc {
  kOk = 0,
  kQuotaExceeded,
  kNotFound,
  kAlreadyExists,
  kUnauthenticated,
  kForbidden,
  kNotAFile,
  kDirectoryNotEmpty,
  kInvalidArgument,
  kStaleReport,
  kScanInProgress,
  kCorruptRecord,
  kStoreFull,
  kIoError,
};

std::string_view errc_name(Errc code);

class Status {
 public:
  Status() = default;
  Status(Errc code, std::string message) : code_(code), message_(std::move(message)) {}

  static Status ok() { return Status(); }

  bool is_ok() const { return code_ == Errc::kOk; }
  Errc code() const { return code_; }
  const std::string& message() const { return message_; }

  // "NotFound: no such entry" style, "OK" when ok.
  std::string to_string() const;

 private:
  Errc code_ = Errc::kOk;
  std::string message_;
};

inline Status quota_exceeded() {
  // Exact denial text surfaced to clients on a rejected create.
  return Status(Errc::kQuotaExceeded, "Quota exceeded");
}

// Value-or-status. Small local stand-in for std::expected.
template <typename T>
class Result {
 public:
  Result(T value) : value_(std::move(value)) {}               // NOLINT(google-explicit-constructor)
  Result(Status status) : status_(std::move(status)) {}       // NOLINT(google-explicit-constructor)
  Result(Errc code, std::string message) : status_(code, std::move(message)) {}

  bool is_ok() const { return status_.is_ok(); }
  const Status& status() const { return status_; }
  Errc code() const { return status_.code(); }

  T& value() & { return *value_; }
  const T& value() const& { return *value_; }
  T&& take() { return std::move(*value_); }

  T* operator->() { return &*value_; }
  const T* operator->() const { return &*value_; }

 private:
  Status status_;
  std::optional<T> value_;
};

}  // namespace quotafs
