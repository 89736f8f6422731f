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

#include "quotafs/namespace_tree.hpp"

#include <algorithm>

namespace quotafs {

// Writers stall at most one chunk-copy while a scan holds the shared lock,
// so the chunk stays small.
namespace {
constexpr std::size_t kIterateChunk = 128;
}

NamespaceTree::NamespaceTree(Journal* journal) : journal_(journal) {
  Node root;
  root.is_dir = true;
  root.id = kRootId;
  root.parent_id = kRootId;
  root.name = "";
  nodes_.emplace(kRootId, std::move(root));
}

Result<std::vector<std::string>> NamespaceTree::split_path(std::string_view path) {
  if (path.empty() || path.front() != '/') {
    return Status(Errc::kInvalidArgument, "path must be absolute: " + std::string(path));
  }
  std::vector<std::string> components;
  std::size_t pos = 1;
  while (pos <= path.size()) {
    std::size_t next = path.find('/', pos);
    if (next == std::string_view::npos) next = path.size();
    std::string_view part = path.substr(pos, next - pos);
    if (part.empty()) {
      if (next != path.size()) {
        return Status(Errc::kInvalidArgument, "empty path component in " + std::string(path));
      }
    } else if (part == "." || part == "..") {
      return Status(Errc::kInvalidArgument, "path component not allowed: " + std::string(part));
    } else {
      components.emplace_back(part);
    }
    pos = next + 1;
  }
  return components;
}

EntryInfo NamespaceTree::to_info(const Node& node) {
  if (node.is_dir) {
    DirectoryEntry d;
    d.id = node.id;
    d.parent_id = node.parent_id;
    d.name = node.name;
    d.uid = node.uid;
    d.gid = node.gid;
    d.default_retention_policy = node.default_policy;
    d.default_access_latency = node.default_latency;
    d.created_at = node.created_at;
    return d;
  }
  FileEntry f;
  f.id = node.id;
  f.parent_id = node.parent_id;
  f.name = node.name;
  f.uid = node.uid;
  f.gid = node.gid;
  f.size_bytes = node.size_bytes;
  f.retention_policy = node.policy;
  f.access_latency = node.latency;
  f.created_at = node.created_at;
  return f;
}

NamespaceTree::Node NamespaceTree::from_info(const EntryInfo& info) {
  Node node;
  if (is_file(info)) {
    const auto& f = std::get<FileEntry>(info);
    node.is_dir = false;
    node.id = f.id;
    node.parent_id = f.parent_id;
    node.name = f.name;
    node.uid = f.uid;
    node.gid = f.gid;
    node.created_at = f.created_at;
    node.size_bytes = f.size_bytes;
    node.policy = f.retention_policy;
    node.latency = f.access_latency;
  } else {
    const auto& d = std::get<DirectoryEntry>(info);
    node.is_dir = true;
    node.id = d.id;
    node.parent_id = d.parent_id;
    node.name = d.name;
    node.uid = d.uid;
    node.gid = d.gid;
    node.created_at = d.created_at;
    node.default_policy = d.default_retention_policy;
    node.default_latency = d.default_access_latency;
  }
  return node;
}

const NamespaceTree::Node* NamespaceTree::resolve_locked(
    const std::vector<std::string>& components) const {
  const Node* node = &nodes_.at(kRootId);
  for (const auto& name : components) {
    if (!node->is_dir) return nullptr;
    auto it = node->children.find(name);
    if (it == node->children.end()) return nullptr;
    node = &nodes_.at(it->second);
  }
  return node;
}

const NamespaceTree::Node* NamespaceTree::resolve_parent_locked(
    const std::vector<std::string>& components) const {
  std::vector<std::string> parent(components.begin(), components.end() - 1);
  const Node* node = resolve_locked(parent);
  if (node == nullptr || !node->is_dir) return nullptr;
  return node;
}

Status NamespaceTree::journal_entry_locked(const Node& node) {
  if (journal_ == nullptr) return Status::ok();
  auto seq = journal_->append(RecordKind::kNsEntry, codec::entry_to_json(to_info(node)));
  return seq.is_ok() ? Status::ok() : seq.status();
}

Result<FileEntry> NamespaceTree::create_entry(std::string_view path, std::uint32_t uid,
                                              std::uint32_t gid,
                                              std::optional<RetentionPolicy> retention_policy,
                                              std::optional<AccessLatency> access_latency,
                                              const AuthContext& caller) {
  if (!caller.authenticated()) {
    return Status(Errc::kUnauthenticated, "create requires an authenticated caller");
  }
  auto components = split_path(path);
  if (!components.is_ok()) return components.status();
  if (components->empty()) {
    return Status(Errc::kInvalidArgument, "cannot create a file at the root path");
  }

  std::unique_lock<std::mutex> commit_lk;
  if (journal_ != nullptr) commit_lk = std::unique_lock<std::mutex>(journal_->commit_mutex());
  std::unique_lock lk(mu_);

  const Node* parent = resolve_parent_locked(components.value());
  if (parent == nullptr) {
    return Status(Errc::kNotFound, "parent directory does not exist: " + std::string(path));
  }
  const std::string& name = components->back();
  if (parent->children.count(name) != 0) {
    return Status(Errc::kAlreadyExists, "entry already exists: " + std::string(path));
  }

  const RetentionPolicy policy = retention_policy.value_or(parent->default_policy);
  const AccessLatency latency = access_latency.value_or(parent->default_latency);

  // Quota gate: cache-only lookup, before any insert.
  if (checker_ != nullptr) {
    CheckDecision decision = checker_->check(uid, gid, policy);
    if (!decision.allowed) return quota_exceeded();
  }

  Node node;
  node.is_dir = false;
  node.id = next_id_;
  node.parent_id = parent->id;
  node.name = name;
  node.uid = uid;
  node.gid = gid;
  node.size_bytes = 0;
  node.policy = policy;
  node.latency = latency;
  node.created_at = create_seq_ + 1;

  Status st = journal_entry_locked(node);
  if (!st.is_ok()) return st;

  ++next_id_;
  ++create_seq_;
  nodes_.at(parent->id).children.emplace(name, node.id);
  auto [it, inserted] = nodes_.emplace(node.id, std::move(node));
  (void)inserted;
  return std::get<FileEntry>(to_info(it->second));
}

Result<DirectoryEntry> NamespaceTree::make_directory(std::string_view path, std::uint32_t uid,
                                                     std::uint32_t gid,
                                                     std::optional<RetentionPolicy> default_policy,
                                                     std::optional<AccessLatency> default_latency,
                                                     const AuthContext& caller) {
  if (!caller.authenticated()) {
    return Status(Errc::kUnauthenticated, "mkdir requires an authenticated caller");
  }
  auto components = split_path(path);
  if (!components.is_ok()) return components.status();
  if (components->empty()) {
    return Status(Errc::kAlreadyExists, "root directory already exists");
  }

  std::unique_lock<std::mutex> commit_lk;
  if (journal_ != nullptr) commit_lk = std::unique_lock<std::mutex>(journal_->commit_mutex());
  std::unique_lock lk(mu_);

  const Node* parent = resolve_parent_locked(components.value());
  if (parent == nullptr) {
    return Status(Errc::kNotFound, "parent directory does not exist: " + std::string(path));
  }
  const std::string& name = components->back();
  if (parent->children.count(name) != 0) {
    return Status(Errc::kAlreadyExists, "entry already exists: " + std::string(path));
  }

  Node node;
  node.is_dir = true;
  node.id = next_id_;
  node.parent_id = parent->id;
  node.name = name;
  node.uid = uid;
  node.gid = gid;
  node.default_policy = default_policy.value_or(parent->default_policy);
  node.default_latency = default_latency.value_or(parent->default_latency);
  node.created_at = create_seq_ + 1;

  Status st = journal_entry_locked(node);
  if (!st.is_ok()) return st;

  ++next_id_;
  ++create_seq_;
  nodes_.at(parent->id).children.emplace(name, node.id);
  auto [it, inserted] = nodes_.emplace(node.id, std::move(node));
  (void)inserted;
  return std::get<DirectoryEntry>(to_info(it->second));
}

Result<FileEntry> NamespaceTree::commit_size(EntryId id, std::uint64_t size_bytes) {
  std::unique_lock<std::mutex> commit_lk;
  if (journal_ != nullptr) commit_lk = std::unique_lock<std::mutex>(journal_->commit_mutex());
  std::unique_lock lk(mu_);

  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    return Status(Errc::kNotFound, "no entry with id " + std::to_string(id));
  }
  if (it->second.is_dir) {
    return Status(Errc::kNotAFile, "entry " + std::to_string(id) + " is a directory");
  }

  Node updated = it->second;
  updated.size_bytes = size_bytes;
  Status st = journal_entry_locked(updated);
  if (!st.is_ok()) return st;

  it->second.size_bytes = size_bytes;
  return std::get<FileEntry>(to_info(it->second));
}

Result<EntryInfo> NamespaceTree::remove_entry(std::string_view path, const AuthContext& caller) {
  if (!caller.authenticated()) {
    return Status(Errc::kUnauthenticated, "remove requires an authenticated caller");
  }
  auto components = split_path(path);
  if (!components.is_ok()) return components.status();
  if (components->empty()) {
    return Status(Errc::kInvalidArgument, "cannot remove the root directory");
  }

  std::unique_lock<std::mutex> commit_lk;
  if (journal_ != nullptr) commit_lk = std::unique_lock<std::mutex>(journal_->commit_mutex());
  std::unique_lock lk(mu_);

  const Node* node = resolve_locked(components.value());
  if (node == nullptr) {
    return Status(Errc::kNotFound, "no such entry: " + std::string(path));
  }
  if (node->is_dir && !node->children.empty()) {
    return Status(Errc::kDirectoryNotEmpty, "directory not empty: " + std::string(path));
  }

  if (journal_ != nullptr) {
    codec::json data;
    data["id"] = node->id;
    auto seq = journal_->append(RecordKind::kNsRemove, std::move(data));
    if (!seq.is_ok()) return seq.status();
  }

  EntryInfo removed = to_info(*node);
  nodes_.at(node->parent_id).children.erase(node->name);
  nodes_.erase(node->id);
  return removed;
}

Result<EntryInfo> NamespaceTree::stat(std::string_view path) const {
  auto components = split_path(path);
  if (!components.is_ok()) return components.status();
  std::shared_lock lk(mu_);
  const Node* node = resolve_locked(components.value());
  if (node == nullptr) return Status(Errc::kNotFound, "no such entry: " + std::string(path));
  return to_info(*node);
}

Result<std::vector<EntryInfo>> NamespaceTree::list(std::string_view path) const {
  auto components = split_path(path);
  if (!components.is_ok()) return components.status();
  std::shared_lock lk(mu_);
  const Node* node = resolve_locked(components.value());
  if (node == nullptr) return Status(Errc::kNotFound, "no such entry: " + std::string(path));
  if (!node->is_dir) return Status(Errc::kInvalidArgument, "not a directory: " + std::string(path));
  std::vector<EntryInfo> out;
  out.reserve(node->children.size());
  for (const auto& [name, id] : node->children) out.push_back(to_info(nodes_.at(id)));
  return out;
}

void NamespaceTree::iterate_entries(const std::function<void(const FileEntry&)>& fn) const {
  full_traversals_.fetch_add(1, std::memory_order_relaxed);
  EntryId cursor = 0;
  std::vector<FileEntry> batch;
  batch.reserve(kIterateChunk);
  bool done = false;
  while (!done) {
    batch.clear();
    {
      std::shared_lock lk(mu_);
      auto it = nodes_.upper_bound(cursor);
      std::size_t visited = 0;
      while (it != nodes_.end() && visited < kIterateChunk) {
        if (!it->second.is_dir) batch.push_back(std::get<FileEntry>(to_info(it->second)));
        cursor = it->first;
        ++it;
        ++visited;
      }
      done = (it == nodes_.end());
    }
    for (const auto& fe : batch) fn(fe);
  }
}

std::uint64_t NamespaceTree::file_count() const {
  std::shared_lock lk(mu_);
  std::uint64_t n = 0;
  for (const auto& [id, node] : nodes_) {
    if (!node.is_dir) ++n;
  }
  return n;
}

std::uint64_t NamespaceTree::entry_count() const {
  std::shared_lock lk(mu_);
  return nodes_.size();
}

Status NamespaceTree::restore_entry(const EntryInfo& info) {
  std::unique_lock lk(mu_);
  Node node = from_info(info);
  if (node.id == kRootId) {
    return Status(Errc::kCorruptRecord, "record redefines the root directory");
  }
  auto existing = nodes_.find(node.id);
  if (existing != nodes_.end()) {
    // Size-commit replay: keep children links, refresh payload fields.
    node.children = std::move(existing->second.children);
    nodes_.at(existing->second.parent_id).children.erase(existing->second.name);
    existing->second = std::move(node);
    nodes_.at(existing->second.parent_id).children.emplace(existing->second.name,
                                                           existing->second.id);
  } else {
    auto parent = nodes_.find(node.parent_id);
    if (parent == nodes_.end() || !parent->second.is_dir) {
      return Status(Errc::kCorruptRecord,
                    "entry record references missing parent " + std::to_string(node.parent_id));
    }
    parent->second.children.emplace(node.name, node.id);
    nodes_.emplace(node.id, std::move(node));
  }
  const Node& stored = nodes_.at(entry_id(info));
  next_id_ = std::max(next_id_, stored.id + 1);
  create_seq_ = std::max(create_seq_, stored.created_at);
  return Status::ok();
}

Status NamespaceTree::restore_remove(EntryId id) {
  std::unique_lock lk(mu_);
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    return Status(Errc::kCorruptRecord, "remove record for unknown id " + std::to_string(id));
  }
  nodes_.at(it->second.parent_id).children.erase(it->second.name);
  nodes_.erase(it);
  return Status::ok();
}

void NamespaceTree::restore_counters(EntryId next_id, std::uint64_t create_seq) {
  std::unique_lock lk(mu_);
  next_id_ = std::max(next_id_, next_id);
  create_seq_ = std::max(create_seq_, create_seq);
}

std::vector<EntryInfo> NamespaceTree::dump_entries() const {
  std::shared_lock lk(mu_);
  std::vector<EntryInfo> out;
  out.reserve(nodes_.size());
  for (const auto& [id, node] : nodes_) {
    if (id == kRootId) continue;
    out.push_back(to_info(node));
  }
  return out;
}

EntryId NamespaceTree::next_id() const {
  std::shared_lock lk(mu_);
  return next_id_;
}

std::uint64_t NamespaceTree::create_seq() const {
  std::shared_lock lk(mu_);
  return create_seq_;
}

}  // namespace quotafs
