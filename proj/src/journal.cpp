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

#include "quotafs/journal.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <fstream>

namespace quotafs {

namespace {

constexpr std::uint32_t kMaxRecordBytes = 64u << 20;
constexpr const char* kJournalName = "journal.log";
constexpr const char* kSnapshotPrefix = "snapshot.";

std::uint32_t crc32_of(const void* data, std::size_t len) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, static_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

Status errno_status(const std::string& what) {
  Errc code = errno == ENOSPC ? Errc::kStoreFull : Errc::kIoError;
  return Status(code, what + ": " + std::strerror(errno));
}

}  // namespace

std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::kLimit: return "LIMIT";
    case RecordKind::kUsage: return "USAGE";
    case RecordKind::kNsEntry: return "NS_ENTRY";
    case RecordKind::kNsRemove: return "NS_REMOVE";
    case RecordKind::kScanMark: return "SCAN_MARK";
  }
  return "LIMIT";
}

Result<RecordKind> parse_record_kind(std::string_view text) {
  if (text == "LIMIT") return RecordKind::kLimit;
  if (text == "USAGE") return RecordKind::kUsage;
  if (text == "NS_ENTRY") return RecordKind::kNsEntry;
  if (text == "NS_REMOVE") return RecordKind::kNsRemove;
  if (text == "SCAN_MARK") return RecordKind::kScanMark;
  return Status(Errc::kCorruptRecord, "unknown record kind: " + std::string(text));
}

std::filesystem::path Journal::journal_path(const std::filesystem::path& data_dir) {
  return data_dir / kJournalName;
}

Journal::Journal(std::filesystem::path dir, int fd, bool fsync_appends, std::uint64_t last_seq)
    : dir_(std::move(dir)), fd_(fd), fsync_appends_(fsync_appends), last_seq_(last_seq) {}

Journal::~Journal() {
  if (fd_ >= 0) ::close(fd_);
}

RecoveredState Journal::scan_journal_file(const std::filesystem::path& journal_file,
                                          std::uint64_t skip_through_seq) {
  RecoveredState out;
  std::ifstream in(journal_file, std::ios::binary);
  if (!in) return out;  // no journal yet
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
  std::size_t off = 0;
  std::uint64_t prev_seq = skip_through_seq;

  auto stop = [&](const std::string& why) {
    out.truncated = true;
    out.truncation_detail = why + " at offset " + std::to_string(off);
  };

  while (off < raw.size()) {
    if (raw.size() - off < 8) {
      stop("torn record header");
      break;
    }
    std::uint32_t len = get_u32(bytes + off);
    std::uint32_t crc = get_u32(bytes + off + 4);
    if (len == 0 || len > kMaxRecordBytes) {
      stop("implausible record length");
      break;
    }
    if (raw.size() - off - 8 < len) {
      stop("torn record body");
      break;
    }
    const char* payload = raw.data() + off + 8;
    if (crc32_of(payload, len) != crc) {
      stop("checksum mismatch");
      break;
    }
    auto parsed = codec::json::parse(std::string_view(payload, len), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      stop("unparseable record payload");
      break;
    }
    auto seq_it = parsed.find("seq");
    auto kind_it = parsed.find("kind");
    auto data_it = parsed.find("data");
    if (seq_it == parsed.end() || !seq_it->is_number_unsigned() || kind_it == parsed.end() ||
        !kind_it->is_string() || data_it == parsed.end()) {
      stop("malformed record envelope");
      break;
    }
    auto kind = parse_record_kind(kind_it->get<std::string>());
    if (!kind.is_ok()) {
      stop(kind.status().message());
      break;
    }
    std::uint64_t seq = seq_it->get<std::uint64_t>();
    off += 8 + len;
    if (seq <= skip_through_seq) continue;  // already covered by the snapshot
    if (seq <= prev_seq) {
      stop("non-monotonic record seq");
      break;
    }
    prev_seq = seq;
    StoreRecord rec;
    rec.seq = seq;
    rec.kind = kind.value();
    rec.data = std::move(*data_it);
    rec.end_offset = off;
    out.records.push_back(std::move(rec));
  }
  return out;
}

Result<Journal::Opened> Journal::open(const std::filesystem::path& data_dir, bool fsync_appends) {
  std::error_code ec;
  std::filesystem::create_directories(data_dir, ec);
  if (ec) return Status(Errc::kIoError, "cannot create data dir: " + ec.message());

  RecoveredState recovered;

  // Highest parseable snapshot wins; older ones are cleanup leftovers.
  std::uint64_t best_seq = 0;
  std::filesystem::path best_path;
  for (const auto& ent : std::filesystem::directory_iterator(data_dir)) {
    const std::string fname = ent.path().filename().string();
    if (fname.rfind(kSnapshotPrefix, 0) != 0) continue;
    char* end = nullptr;
    std::uint64_t seq = std::strtoull(fname.c_str() + std::strlen(kSnapshotPrefix), &end, 10);
    if (end == nullptr || *end != '\0') continue;
    if (best_path.empty() || seq > best_seq) {
      best_seq = seq;
      best_path = ent.path();
    }
  }
  if (!best_path.empty()) {
    std::ifstream in(best_path, std::ios::binary);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto parsed = codec::json::parse(raw, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("state")) {
      return Status(Errc::kCorruptRecord, "unreadable snapshot: " + best_path.string());
    }
    recovered.snapshot = parsed["state"];
    recovered.snapshot_seq = best_seq;
  }

  const auto jpath = journal_path(data_dir);
  RecoveredState scanned = scan_journal_file(jpath, recovered.snapshot_seq);
  recovered.records = std::move(scanned.records);
  recovered.truncated = scanned.truncated;
  recovered.truncation_detail = scanned.truncation_detail;

  std::uint64_t last_seq = recovered.snapshot_seq;
  for (const auto& rec : recovered.records) last_seq = rec.seq;

  // Cut a torn tail so new appends extend a valid prefix.
  if (recovered.truncated) {
    std::uint64_t keep = recovered.records.empty() ? 0 : recovered.records.back().end_offset;
    std::filesystem::resize_file(jpath, keep, ec);
    if (ec) return Status(Errc::kIoError, "cannot truncate torn journal: " + ec.message());
  }

  int fd = ::open(jpath.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) return errno_status("cannot open journal");

  Opened opened;
  opened.journal.reset(new Journal(data_dir, fd, fsync_appends, last_seq));
  opened.recovered = std::move(recovered);
  return opened;
}

Status Journal::write_all(const void* data, std::size_t len) {
  const char* p = static_cast<const char*>(data);
  while (len > 0) {
    ssize_t n = ::write(fd_, p, len);
    if (n < 0) {
      if (errno == EINTR) continue;
      return errno_status("journal write failed");
    }
    p += n;
    len -= static_cast<std::size_t>(n);
  }
  return Status::ok();
}

Result<std::uint64_t> Journal::append(RecordKind kind, codec::json data) {
  std::lock_guard<std::mutex> lk(append_mu_);
  codec::json envelope;
  envelope["seq"] = last_seq_ + 1;
  envelope["kind"] = to_string(kind);
  envelope["data"] = std::move(data);
  const std::string payload = envelope.dump();
  if (payload.size() > kMaxRecordBytes) {
    return Status(Errc::kInvalidArgument, "record too large");
  }

  std::string frame;
  frame.reserve(payload.size() + 8);
  put_u32(frame, static_cast<std::uint32_t>(payload.size()));
  put_u32(frame, crc32_of(payload.data(), payload.size()));
  frame += payload;

  const off_t pre_size = ::lseek(fd_, 0, SEEK_END);
  Status st = write_all(frame.data(), frame.size());
  if (!st.is_ok()) {
    // Cut back any partial frame so later appends extend a valid prefix.
    if (pre_size >= 0) (void)::ftruncate(fd_, pre_size);
    return st;
  }
  if (fsync_appends_ && ::fdatasync(fd_) != 0) return errno_status("journal fdatasync failed");
  return ++last_seq_;
}

Result<std::uint64_t> Journal::compact(const codec::json& state) {
  std::lock_guard<std::mutex> lk(append_mu_);
  codec::json snapshot;
  snapshot["lastSeq"] = last_seq_;
  snapshot["state"] = state;
  const std::string body = snapshot.dump();

  const auto final_path = dir_ / (kSnapshotPrefix + std::to_string(last_seq_));
  const auto tmp_path = dir_ / (kSnapshotPrefix + std::to_string(last_seq_) + ".tmp");
  {
    int fd = ::open(tmp_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) return errno_status("cannot write snapshot");
    const char* p = body.data();
    std::size_t len = body.size();
    while (len > 0) {
      ssize_t n = ::write(fd, p, len);
      if (n < 0) {
        if (errno == EINTR) continue;
        Status st = errno_status("snapshot write failed");
        ::close(fd);
        return st;
      }
      p += n;
      len -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) {
      Status st = errno_status("snapshot fsync failed");
      ::close(fd);
      return st;
    }
    ::close(fd);
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) return Status(Errc::kIoError, "snapshot rename failed: " + ec.message());

  if (::ftruncate(fd_, 0) != 0) return errno_status("journal truncate failed");

  for (const auto& ent : std::filesystem::directory_iterator(dir_)) {
    const std::string fname = ent.path().filename().string();
    if (fname.rfind(kSnapshotPrefix, 0) == 0 && ent.path() != final_path) {
      std::filesystem::remove(ent.path(), ec);
    }
  }
  return last_seq_;
}

}  // namespace quotafs
