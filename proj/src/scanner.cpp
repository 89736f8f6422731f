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

#include "quotafs/scanner.hpp"

namespace quotafs {

Scanner::Scanner(NamespaceTree& ns, QuotaEngine& engine, Journal* journal)
    : ns_(ns), engine_(engine), journal_(journal) {}

Scanner::~Scanner() { stop_schedule(); }

void Scanner::set_scan_observer(std::function<void(const FileEntry&)> observer) {
  observer_ = std::move(observer);
}

void Scanner::restore_scan_seq(std::uint64_t seq) {
  std::uint64_t cur = scan_seq_.load(std::memory_order_relaxed);
  while (seq > cur && !scan_seq_.compare_exchange_weak(cur, seq, std::memory_order_relaxed)) {
  }
}

Result<ScanReport> Scanner::run_scan_now() {
  bool expected = false;
  if (!scanning_.compare_exchange_strong(expected, true)) {
    return Status(Errc::kScanInProgress, "another scan is already running");
  }

  ScanReport report;
  report.scan_seq = scan_seq_.load(std::memory_order_relaxed) + 1;
  report.started_at_ms = now_unix_ms();
  ns_.iterate_entries([&](const FileEntry& entry) {
    if (observer_) observer_(entry);
    report.usage[QuotaKey{ScopeKind::kUser, entry.uid}].at(entry.retention_policy) +=
        entry.size_bytes;
    report.usage[QuotaKey{ScopeKind::kGroup, entry.gid}].at(entry.retention_policy) +=
        entry.size_bytes;
    ++report.entries_scanned;
  });
  report.finished_at_ms = now_unix_ms();

  Status st = engine_.apply_scan(report);
  if (!st.is_ok()) {
    scanning_.store(false);
    return st;
  }
  scan_seq_.store(report.scan_seq, std::memory_order_relaxed);

  if (journal_ != nullptr) {
    codec::json mark;
    mark["scanSeq"] = report.scan_seq;
    mark["entriesScanned"] = report.entries_scanned;
    mark["startedAtMs"] = report.started_at_ms;
    mark["finishedAtMs"] = report.finished_at_ms;
    std::lock_guard<std::mutex> commit_lk(journal_->commit_mutex());
    auto seq = journal_->append(RecordKind::kScanMark, std::move(mark));
    if (!seq.is_ok()) {
      scanning_.store(false);
      return seq.status();
    }
  }

  completed_.fetch_add(1, std::memory_order_relaxed);
  scanning_.store(false);
  return report;
}

Status Scanner::start_schedule(const ScanSchedule& schedule) {
  if (schedule.interval <= std::chrono::milliseconds::zero()) {
    return Status(Errc::kInvalidArgument, "scan interval must be positive");
  }
  std::lock_guard<std::mutex> lifecycle(lifecycle_mu_);
  stop_ticker_locked();
  if (!schedule.enabled) return Status::ok();
  {
    std::lock_guard<std::mutex> lk(sched_mu_);
    stop_requested_ = false;
    ticker_active_ = true;
  }
  ticker_ = std::thread([this, interval = schedule.interval] { ticker_loop(interval); });
  return Status::ok();
}

void Scanner::ticker_loop(std::chrono::milliseconds interval) {
  auto next_fire = std::chrono::steady_clock::now();
  for (;;) {
    {
      std::unique_lock<std::mutex> lk(sched_mu_);
      sched_cv_.wait_until(lk, next_fire, [this] { return stop_requested_; });
      if (stop_requested_) return;
    }
    // Busy scanner means this fire is skipped, not queued.
    (void)run_scan_now();
    auto now = std::chrono::steady_clock::now();
    next_fire += interval;
    if (next_fire < now) next_fire = now + interval;
  }
}

void Scanner::stop_schedule() {
  std::lock_guard<std::mutex> lifecycle(lifecycle_mu_);
  stop_ticker_locked();
}

void Scanner::stop_ticker_locked() {
  {
    std::lock_guard<std::mutex> lk(sched_mu_);
    if (!ticker_active_) return;
    stop_requested_ = true;
  }
  sched_cv_.notify_all();
  if (ticker_.joinable()) ticker_.join();
  std::lock_guard<std::mutex> lk(sched_mu_);
  ticker_active_ = false;
}

bool Scanner::schedule_running() const {
  std::lock_guard<std::mutex> lk(sched_mu_);
  return ticker_active_ && !stop_requested_;
}

}  // namespace quotafs
