#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "irap/rdf.hpp"

namespace irap {

/// Position of a changeset in the publication sequence.
struct SequenceKey {
  int year = 0;
  int month = 0;
  int day = 0;
  int hour = 0;
  int serial = 0;

  /// YYYY-MM-DD-HH-NNNNNN
  std::string to_string() const;
  static std::optional<SequenceKey> parse(std::string_view text);

  friend auto operator<=>(const SequenceKey&, const SequenceKey&) = default;
};

struct ChangesetRef {
  SequenceKey key;
  std::optional<std::filesystem::path> removed_path;
  std::optional<std::filesystem::path> added_path;
};

struct ScanResult {
  std::vector<ChangesetRef> refs;  // ascending by key
  std::size_t ignored = 0;         // entries not following the layout
  std::vector<std::string> warnings;
};

/// Lists changesets under ROOT/YYYY/MM/DD/HH/NNNNNN.{removed|added}.nt[.gz]
/// with key > `after`. Throws RetryableError if the root cannot be read.
ScanResult scan_changesets(const std::filesystem::path& root, std::optional<SequenceKey> after = std::nullopt);

/// Parses both sides leniently, gunzipping `.gz` files; a missing side is
/// empty. Throws RetryableError on I/O or decompression failure.
Changeset load_changeset(const ChangesetRef& ref, std::size_t* skipped_lines = nullptr);

/// Reads a whole file, transparently gunzipping when the name ends in `.gz`.
std::string read_maybe_gzipped(const std::filesystem::path& path);

/// Last applied sequence key per interest, stored as `<id> <key>` lines.
class Checkpoint {
 public:
  /// A missing file yields an empty checkpoint. Throws CheckpointError on a
  /// corrupt file.
  static Checkpoint read(const std::filesystem::path& path);

  std::optional<SequenceKey> get(const std::string& id) const;
  /// Throws CheckpointError if `key` is older than the current value.
  void advance(const std::string& id, const SequenceKey& key);
  /// Sets or clears the entry without the monotonicity check.
  void reset(const std::string& id, std::optional<SequenceKey> key);
  /// Durable write: temporary file, sync, rename.
  void save(const std::filesystem::path& path) const;

  const std::map<std::string, SequenceKey>& entries() const { return entries_; }

 private:
  std::map<std::string, SequenceKey> entries_;
};

/// Read, advance and save in one step.
void advance_checkpoint(const std::filesystem::path& path, const std::string& id, const SequenceKey& key);

}  // namespace irap
