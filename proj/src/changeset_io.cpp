#include "irap/changeset_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <functional>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "irap/error.hpp"
#include "irap/fault.hpp"
#include "irap/ntriples.hpp"
#include "irap/store.hpp"

namespace irap {

namespace fs = std::filesystem;

namespace {

// Digits-only name of exactly `width` characters.
std::optional<int> numeric_name(std::string_view name, std::size_t width) {
  if (name.size() != width) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), value);
  if (ec != std::errc() || ptr != name.data() + name.size()) return std::nullopt;
  return value;
}

std::vector<fs::directory_entry> sorted_entries(const fs::path& dir) {
  std::vector<fs::directory_entry> out;
  std::error_code ec;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) out.push_back(*it);
  if (ec) throw RetryableError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path() < b.path(); });
  return out;
}

struct FileName {
  int serial;
  bool removed;
};

std::optional<FileName> parse_file_name(std::string_view name) {
  if (name.size() < 7 || name[6] != '.') return std::nullopt;
  auto serial = numeric_name(name.substr(0, 6), 6);
  if (!serial) return std::nullopt;
  auto rest = name.substr(7);
  for (std::string_view side : {"removed", "added"}) {
    for (std::string_view ext : {".nt", ".nt.gz"}) {
      if (rest.size() == side.size() + ext.size() && rest.starts_with(side) && rest.ends_with(ext)) {
        return FileName{*serial, side == "removed"};
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::string SequenceKey::to_string() const {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d-%02d-%06d", year, month, day, hour, serial);
  return buf;
}

std::optional<SequenceKey> SequenceKey::parse(std::string_view text) {
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != '-' || text[13] != '-') return std::nullopt;
  auto y = numeric_name(text.substr(0, 4), 4);
  auto mo = numeric_name(text.substr(5, 2), 2);
  auto d = numeric_name(text.substr(8, 2), 2);
  auto h = numeric_name(text.substr(11, 2), 2);
  auto s = numeric_name(text.substr(14, 6), 6);
  if (!y || !mo || !d || !h || !s) return std::nullopt;
  return SequenceKey{*y, *mo, *d, *h, *s};
}

ScanResult scan_changesets(const fs::path& root, std::optional<SequenceKey> after) {
  ScanResult result;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw RetryableError("changeset root is not a readable directory: " + root.string());

  auto ignore = [&](const fs::path& p) {
    ++result.ignored;
    result.warnings.push_back("ignored " + p.string());
  };
  // Prefix pruning: a folder whose key prefix is below `after` holds nothing new.
  auto below = [&](std::array<int, 4> prefix, int depth) {
    if (!after) return false;
    std::array<int, 4> bound{after->year, after->month, after->day, after->hour};
    for (int k = 0; k < depth; ++k) {
      if (prefix[k] != bound[k]) return prefix[k] < bound[k];
    }
    return false;
  };

  std::array<int, 4> prefix{};
  std::function<void(const fs::path&, int)> walk = [&](const fs::path& dir, int depth) {
    for (const auto& entry : sorted_entries(dir)) {
      std::string name = entry.path().filename().string();
      if (depth < 4) {
        auto value = numeric_name(name, depth == 0 ? 4 : 2);
        if (!value || !entry.is_directory()) {
          ignore(entry.path());
          continue;
        }
        prefix[depth] = *value;
        if (below(prefix, depth + 1)) continue;
        walk(entry.path(), depth + 1);
        continue;
      }
      auto file = entry.is_regular_file() ? parse_file_name(name) : std::nullopt;
      if (!file) {
        ignore(entry.path());
        continue;
      }
      SequenceKey key{prefix[0], prefix[1], prefix[2], prefix[3], file->serial};
      if (after && !(key > *after)) continue;
      if (result.refs.empty() || result.refs.back().key != key) result.refs.push_back(ChangesetRef{key, {}, {}});
      auto& slot = file->removed ? result.refs.back().removed_path : result.refs.back().added_path;
      if (slot) {
        ignore(entry.path());
        continue;
      }
      slot = entry.path();
    }
  };
  walk(root, 0);

  std::sort(result.refs.begin(), result.refs.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  for (std::size_t k = 1; k < result.refs.size(); ++k) {
    const auto& prev = result.refs[k - 1].key;
    const auto& cur = result.refs[k].key;
    bool same_hour = prev.year == cur.year && prev.month == cur.month && prev.day == cur.day && prev.hour == cur.hour;
    if (same_hour && cur.serial > prev.serial + 1) {
      result.warnings.push_back("serial gap between " + prev.to_string() + " and " + cur.to_string());
    }
  }
  return result;
}

std::string read_maybe_gzipped(const fs::path& path) {
  if (path.extension() != ".gz") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RetryableError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw RetryableError("read error on " + path.string());
    return ss.str();
  }
  gzFile gz = gzopen(path.c_str(), "rb");
  if (!gz) throw RetryableError("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  while (true) {
    int n = gzread(gz, buf, sizeof buf);
    if (n < 0) {
      int errnum = 0;
      std::string msg = gzerror(gz, &errnum);
      gzclose(gz);
      throw RetryableError("corrupt gzip " + path.string() + ": " + msg);
    }
    if (n == 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  // gzread reports a truncated stream only through gzclose / gzerror.
  int errnum = 0;
  gzerror(gz, &errnum);
  int rc = gzclose(gz);
  if (errnum != Z_OK || rc != Z_OK) throw RetryableError("corrupt gzip " + path.string());
  return out;
}

Changeset load_changeset(const ChangesetRef& ref, std::size_t* skipped_lines) {
  Changeset cs;
  std::size_t skipped = 0;
  auto load_side = [&](const std::optional<fs::path>& path, Graph& out) {
    if (!path) return;
    auto result = parse_ntriples(read_maybe_gzipped(*path), {.mode = ParseMode::kLenient, .doc_id = {}});
    skipped += result.skipped;
    out = std::move(result.graph);
  };
  load_side(ref.removed_path, cs.removed);
  load_side(ref.added_path, cs.added);
  if (skipped_lines) *skipped_lines = skipped;
  return cs;
}

Checkpoint Checkpoint::read(const fs::path& path) {
  Checkpoint cp;
  std::ifstream in(path);
  if (!in) {
    if (fs::exists(path)) throw CheckpointError("cannot read checkpoint " + path.string());
    return cp;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto space = line.rfind(' ');
    std::optional<SequenceKey> key;
    if (space != std::string::npos && space > 0) key = SequenceKey::parse(std::string_view(line).substr(space + 1));
    if (!key) {
      throw CheckpointError("corrupt checkpoint " + path.string() + " at line " + std::to_string(line_no) +
                            "; re-initialize the affected interests from a slice (init-slice) and remove the file");
    }
    cp.entries_[line.substr(0, space)] = *key;
  }
  return cp;
}

std::optional<SequenceKey> Checkpoint::get(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void Checkpoint::advance(const std::string& id, const SequenceKey& key) {
  auto it = entries_.find(id);
  if (it != entries_.end() && key < it->second) {
    throw CheckpointError("checkpoint regression for " + id + ": " + key.to_string() + " < " + it->second.to_string());
  }
  entries_[id] = key;
}

void Checkpoint::reset(const std::string& id, std::optional<SequenceKey> key) {
  if (key) {
    entries_[id] = *key;
  } else {
    entries_.erase(id);
  }
}

void Checkpoint::save(const fs::path& path) const {
  std::string text;
  for (const auto& [id, key] : entries_) text += id + " " + key.to_string() + "\n";
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_durably(path, text);
}

void advance_checkpoint(const fs::path& path, const std::string& id, const SequenceKey& key) {
  Checkpoint cp = Checkpoint::read(path);
  cp.advance(id, key);
  cp.save(path);
  fault::point("checkpoint-written");
}

}  // namespace irap
