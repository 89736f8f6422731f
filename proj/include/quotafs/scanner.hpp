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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>

#include "quotafs/journal.hpp"
#include "quotafs/namespace_tree.hpp"
#include "quotafs/quota_engine.hpp"
#include "quotafs/status.hpp"
#include "quotafs/types.hpp"

namespace quotafs {

struct ScanSchedule {
  std::chrono::milliseconds interval{60'000};
  bool enabled = true;
};

// Walks every namespace entry, sums sizes per (user, policy) and
// (group, policy), and hands the result to the quota engine. Full rescan
// every time; nothing is accounted incrementally.
class Scanner {
 public:
  Scanner(NamespaceTree& ns, QuotaEngine& engine, Journal* journal = nullptr);
  ~Scanner();

  Scanner(const Scanner&) = delete;
  Scanner& operator=(const Scanner&) = delete;

  // One full pass, serialized: a second caller gets ScanInProgress.
  Result<ScanReport> run_scan_now();

  // Fires a scan immediately, then every `interval` after the previous
  // start. Fires that would overlap a running scan are skipped.
  Status start_schedule(const ScanSchedule& schedule);

  // Stops future fires; an in-flight scan finishes.
  void stop_schedule();

  bool schedule_running() const;
  std::uint64_t last_scan_seq() const { return scan_seq_.load(std::memory_order_relaxed); }
  std::uint64_t scans_completed() const { return completed_.load(std::memory_order_relaxed); }

  void restore_scan_seq(std::uint64_t seq);

  // Test hook, called once per scanned entry.
  void set_scan_observer(std::function<void(const FileEntry&)> observer);

 private:
  void ticker_loop(std::chrono::milliseconds interval);
  void stop_ticker_locked();

  NamespaceTree& ns_;
  QuotaEngine& engine_;
  Journal* journal_;

  std::atomic<bool> scanning_{false};
  std::atomic<std::uint64_t> scan_seq_{0};
  std::atomic<std::uint64_t> completed_{0};

  std::mutex lifecycle_mu_;  // serializes start/stop of the ticker
  mutable std::mutex sched_mu_;
  std::condition_variable sched_cv_;
  bool stop_requested_ = false;
  bool ticker_active_ = false;
  std::thread ticker_;

  std::function<void(const FileEntry&)> observer_;
};

}  // namespace quotafs
