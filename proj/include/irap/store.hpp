#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <absl/container/btree_set.h>
#include <absl/container/flat_hash_map.h>

#include "irap/pattern.hpp"
#include "irap/rdf.hpp"
#include "irap/triple_view.hpp"

namespace irap {

struct ApplyCounts {
  std::size_t removed = 0;
  std::size_t added = 0;
  friend bool operator==(const ApplyCounts&, const ApplyCounts&) = default;
};

/// Triple set with a term dictionary and SPO, POS and OSP indexes.
///
/// Writers call apply(), which takes the exclusive lock. Readers hold
/// read_lock() around scans; scan() itself does not lock, so nested scans
/// from a visitor are safe.
class TripleStore final : public TripleView {
 public:
  TripleStore() = default;
  TripleStore(const TripleStore&) = delete;
  TripleStore& operator=(const TripleStore&) = delete;

  bool scan(const Term* s, const Term* p, const Term* o, Visitor visit) const override;
  bool contains(const Triple& t) const override;

  std::size_t size() const { return spo_.size(); }
  Graph snapshot() const;

  /// Removes then inserts; returns the number of triples actually affected.
  ApplyCounts apply(const Graph& removed, const Graph& added);
  void load(const Graph& g);
  void clear();

  /// Every stored triple matching `tp` under `mu`, with the extended binding.
  std::vector<std::pair<Triple, Binding>> match_pattern(const TriplePattern& tp, const Binding& mu) const;

  std::shared_lock<std::shared_mutex> read_lock() const { return std::shared_lock(mutex_); }

 private:
  using Key = std::array<std::uint32_t, 3>;

  std::optional<std::uint32_t> find_id(const Term& t) const;
  std::uint32_t intern(const Term& t);
  bool insert_unlocked(const Triple& t);
  bool erase_unlocked(const Triple& t);

  std::vector<Term> terms_;
  absl::flat_hash_map<std::string, std::uint32_t> ids_;
  absl::btree_set<Key> spo_;
  absl::btree_set<Key> pos_;
  absl::btree_set<Key> osp_;
  mutable std::shared_mutex mutex_;
};

/// A TripleStore persisted in a directory as `snapshot.nt` (canonical
/// N-Triples) plus an append-only journal of checksummed delta records.
/// Replaying the journal from any earlier state yields the same set, so a
/// record may be applied more than once.
class DurableStore {
 public:
  /// Opens or creates the store; an empty path gives a memory-only store.
  explicit DurableStore(std::filesystem::path dir = {});

  const TripleStore& data() const { return data_; }
  const std::filesystem::path& dir() const { return dir_; }
  bool persistent() const { return !dir_.empty(); }

  /// Durably journals the delta, then applies it.
  ApplyCounts commit(const Graph& removed, const Graph& added);
  /// Replaces the content and writes a fresh snapshot.
  void reset(const Graph& g);
  /// Folds the journal into the snapshot.
  void compact();

 private:
  void recover();

  std::filesystem::path dir_;
  TripleStore data_;
  std::uint64_t next_seq_ = 1;
  std::uintmax_t journal_bytes_ = 0;
  std::uintmax_t snapshot_bytes_ = 0;
};

/// Target dataset and potentially interesting partition of one interest,
/// committed together through an intent file in the partition directory.
class StorePair {
 public:
  struct Commit {
    ApplyCounts target;
    ApplyCounts pi;
  };

  /// Memory-only when both paths are empty. Redoes a pending transaction.
  StorePair(std::filesystem::path target_dir, std::filesystem::path pi_dir);
  StorePair() : StorePair({}, {}) {}

  const TripleStore& target() const { return target_.data(); }
  const TripleStore& pi() const { return pi_.data(); }

  Commit commit(const Changeset& target_delta, const Changeset& pi_delta);
  /// Replaces both datasets, e.g. when initialising from a slice.
  void reset(const Graph& target, const Graph& pi);

 private:
  std::filesystem::path intent_path() const;
  void redo_pending();

  DurableStore target_;
  DurableStore pi_;
  std::mutex writer_;
};

/// DELETE DATA block then INSERT DATA block, N-Triples payload, sorted lines.
std::string export_update_stream(const Changeset& interesting);
/// Inverse of export_update_stream. Throws ParseError on malformed input.
Changeset parse_update_stream(std::string_view text);

/// Writes `content` to `path` through a synced temporary file and a rename.
void write_file_durably(const std::filesystem::path& path, std::string_view content);

}  // namespace irap
